from __future__ import annotations

import json

import pytest

from aacsim.harness import builtin_scenario, read_csv
from aacsim.harness.cli import main


def test_list_builtins(capsys):
    assert main(["list-builtins"]) == 0
    out = capsys.readouterr().out.split("\n")
    assert out[0].startswith("fig1a") and any(line.startswith("zero") for line in out)


def test_run_with_overrides(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--scenario", "fig1c", "--out", str(out), "--t-end", "0.5", "--seed", "9", "--plot"]) == 0
    log = read_csv(out)
    assert len(log) == 51 and log.t[-1] == 0.5
    assert (tmp_path / "r.py").exists()


def test_run_from_file(tmp_path):
    path = tmp_path / "s.json"
    builtin_scenario("zero").with_overrides(t_end=0.1).save(path)
    assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "z.csv"), "--dt", "0.01"]) == 0
    assert len(read_csv(tmp_path / "z.csv")) == 2


def test_errors_exit_one(tmp_path, capsys):
    assert main(["run", "--scenario", "nope", "--out", str(tmp_path / "x.csv")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    assert main(["verify", "--scenario", str(bad)]) == 1
    assert main(["run", "--scenario", "fig1a", "--out", str(tmp_path / "x.csv"), "--t-end", "0.0005"]) == 1


def test_verify_pass_json(capsys):
    assert main(["verify", "--scenario", "zero", "--t-end", "2", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True


def test_verify_failure_exits_two(capsys):
    # one second is too short for the accurate run to meet its tail bound
    assert main(["verify", "--scenario", "fig1b", "--t-end", "1"]) == 2
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_unstable_run_exits_two(tmp_path):
    path = tmp_path / "s.json"
    import numpy as np

    builtin_scenario("fig1a").with_overrides(t_end=0.1, x0=np.array([1e308, 1e308])).save(path)
    assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "x.csv")]) == 2


@pytest.mark.slow
def test_run_all(tmp_path, capsys):
    assert main(["run-all", "--builtin", "--out-dir", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.csv"))) == 12
    assert len(list(tmp_path.glob("*.py"))) == 12
