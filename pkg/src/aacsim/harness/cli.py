"""Command-line entry point: ``aacsim {run,run-all,verify,list-builtins}``.

Exit codes: 0 success, 2 a stability check failed, 1 any other error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..errors import AacsimError, SimulationError
from .builtins import builtin_names, builtin_scenario
from .runlog import emit_plot_script, export_csv
from .scenario import Scenario
from .simulate import simulate

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAILED = 0, 1, 2

def load_scenario(ref: str) -> Scenario:
    """``ref`` is a path to a scenario JSON file or a built-in scenario name."""
    path = Path(ref)
    if path.is_file():
        return Scenario.load(path)
    if ref in builtin_names():
        return builtin_scenario(ref)
    raise FileNotFoundError(f"no scenario file or built-in named {ref!r}")


def _apply_overrides(scn: Scenario, args) -> Scenario:
    return scn.with_overrides(dt=args.dt, t_end=args.t_end, seed=args.seed)


def cmd_run(args) -> int:
    scn = _apply_overrides(load_scenario(args.scenario), args)
    run = simulate(scn)
    out = export_csv(run, args.out)
    if args.plot:
        emit_plot_script(run, out.with_suffix(".py"), csv_name=out.name)
    s = run.summary()
    print(f"{scn.name}: {run.data.shape[0]} rows -> {out}  terminal |x| = {s.terminal_x_norm:.6g}")
    return EXIT_OK


def _run_one(name: str, out_dir: str) -> str:
    scn = builtin_scenario(name)
    run = simulate(scn)
    csv = export_csv(run, Path(out_dir) / f"{name}.csv")
    emit_plot_script(run, csv.with_suffix(".py"), csv_name=csv.name)
    return str(csv)


def cmd_run_all(args) -> int:
    if not args.builtin:
        raise AacsimError("run-all currently supports only --builtin")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = builtin_names()
    if args.jobs == 1:
        paths = [_run_one(n, str(out_dir)) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            paths = list(pool.map(_run_one, names, [str(out_dir)] * len(names)))
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_verify(args) -> int:
    from ..verify import verify_scenario

    scn = _apply_overrides(load_scenario(args.scenario), args)
    report = verify_scenario(scn)
    print(report.to_json() if args.json else report.format_table())
    if report.error:
        return EXIT_CHECK_FAILED if report.error.startswith(("NonFinite", "CapExceeded")) else EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_list(args) -> int:
    for name in builtin_names():
        print(f"{name:8s} {builtin_scenario(name).description}")
    return EXIT_OK


def _add_overrides(p):
    p.add_argument("--dt", type=float, help="integration step [s]")
    p.add_argument("--t-end", type=float, help="horizon [s]")
    p.add_argument("--seed", type=int, help="64-bit noise seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aacsim", description="Adaptive approximation-based control simulator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write its CSV log")
    p.add_argument("--scenario", required=True, help="scenario JSON file or built-in name")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plot", action="store_true", help="also write a matplotlib script next to the CSV")
    _add_overrides(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("run-all", help="simulate every built-in scenario")
    p.add_argument("--builtin", action="store_true", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_run_all)

    p = sub.add_parser("verify", help="run a scenario and apply its stability checks")
    p.add_argument("--scenario", required=True)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    _add_overrides(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("list-builtins", help="list built-in scenario names")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SimulationError as exc:
        # a diverging or runaway closed loop is a stability failure, not a usage error
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (AacsimError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
