from __future__ import annotations

import math

import numpy as np
import pytest

from aacsim.errors import WrongScenarioKind
from aacsim.harness import builtin_scenario, builtin_scenarios
from aacsim.harness.runlog import RunLog
from aacsim.numerics import lyapunov_residual
from aacsim.verify import (
    TANH_BOUND_C,
    ReferenceAnchor,
    check_indirect_tracking,
    check_tanh_bound,
    check_ultimate_boundedness,
    check_vc_descent,
    tanh_bound_margin,
    verify_scenario,
)


def test_tanh_bound_constant_is_the_fixed_point():
    assert abs(TANH_BOUND_C - math.exp(-(TANH_BOUND_C + 1))) <= 5e-5


def test_tanh_bound_examples():
    assert tanh_bound_margin(np.zeros(3), 0.5) == pytest.approx(3 * 0.5 * TANH_BOUND_C)
    gap = 1 - math.tanh(100.0)
    assert gap == pytest.approx(0.0, abs=1e-12)
    assert tanh_bound_margin([1.0], 0.01) == pytest.approx(0.002785 - gap)


def test_tanh_bound_scalar_worst_case_grid():
    # with r = |a| / b the scalar gap is b * r (1 - tanh r); its maximum over r is the tight constant
    r = np.linspace(0.0, 10.0, 1_000_001)
    worst = float(np.max(r * (1.0 - np.tanh(r))))
    assert worst <= TANH_BOUND_C
    assert TANH_BOUND_C - worst < 1e-4


def test_tanh_bound_random_suite():
    res = check_tanh_bound(trials=10_000, n_max=10, seed=0)
    assert res.passed and res.violations == 0 and res.worst_margin >= -1e-12


def test_tanh_bound_fails_with_too_small_constant():
    assert not check_tanh_bound(trials=10_000, n_max=1, seed=0, c=0.2).passed


def _synthetic_log(x, name="dummy"):
    t = np.arange(len(x)) * 0.1
    n, k = x.shape[1], 10
    data = np.zeros((len(x), 1 + 2 * n + 3 + k + 3))
    data[:, 0] = t
    data[:, 1:1 + n] = x
    data[:, 1 + n:1 + 2 * n] = x
    data[:, -1] = np.linalg.norm(x, axis=1)
    data[:, -2] = 0.5 * (x**2).sum(1)
    return RunLog(n=n, m=1, k=k, data=data, name=name, measurement_kind="accurate")


def test_diverging_dummy_fails():
    t = np.arange(401) * 0.1
    log = _synthetic_log(np.column_stack([np.exp(0.2 * t), np.zeros_like(t)]))
    report = check_ultimate_boundedness(log, threshold=0.05)
    assert not report.passed
    cfg = builtin_scenario("fig1a").controller
    assert not check_vc_descent(log, ReferenceAnchor(np.zeros(10), 0.0), cfg).passed


def test_converging_dummy_passes():
    t = np.arange(401) * 0.1
    log = _synthetic_log(np.column_stack([np.exp(-t), np.zeros_like(t)]))
    assert check_ultimate_boundedness(log, threshold=0.05).passed
    cfg = builtin_scenario("fig1a").controller
    assert check_vc_descent(log, ReferenceAnchor(np.zeros(10), 0.0), cfg).passed


def test_wrong_kind_for_tracking(runs):
    log = runs("fig1c")
    with pytest.raises(WrongScenarioKind):
        check_indirect_tracking(log, [1.0, 0.0], 0.15)


def test_zero_bias_tracking_reduces_to_state_bound(runs):
    log = runs("fig1a")
    report = check_indirect_tracking(log, [0.0, 0.0], 0.05)
    assert report.passed
    assert report.checks[0].value == pytest.approx(log.summary().tail_sup_x_norm)


@pytest.mark.parametrize("scn", builtin_scenarios(), ids=lambda s: s.name)
def test_lyapunov_residual_of_builtins(scn):
    plant = scn.build_plant()
    cfg = scn.controller
    assert lyapunov_residual(plant.A - plant.B @ cfg.K, cfg.P, cfg.Q) <= 1e-9


def test_zero_sanity_vc_is_identically_zero(runs):
    scn = builtin_scenario("zero")
    report = verify_scenario(scn, runs("zero"))
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("name,threshold", [("fig1a", 0.05), ("fig1c", 0.2), ("fig1d", 0.5)])
def test_ultimate_bounds(name, threshold, runs):
    assert builtin_scenario(name).checks["ultimate_bound"] == threshold
    report = check_ultimate_boundedness(runs(name), threshold)
    assert report.passed, report.format_table()


@pytest.mark.slow
def test_noise_bound_shrinks_with_learning_rate(runs):
    assert runs("fig1d").summary().tail_sup_x_norm > runs("fig1c").summary().tail_sup_x_norm


@pytest.mark.slow
def test_vc_descent_fig1a(runs):
    scn = builtin_scenario("fig1a")
    fine = runs("fig1a", 5e-4)
    anchor = ReferenceAnchor(fine.theta[-1], float(fine.lam[-1]))
    assert check_vc_descent(runs("fig1a"), anchor, scn.controller).passed


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fig1g", "fig1h"])
def test_fading_invariance(name, runs):
    assert runs(name).summary().tail_sup_x_norm <= 0.05


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fig1e", "fig1f"])
def test_bias_tracking_invariant(name, runs):
    # sup ||y|| over the tail within the accurate-run threshold plus 0.05 slack
    log = runs(name)
    sup_y = float(np.linalg.norm(log.y[log.tail_mask()], axis=1).max())
    assert sup_y <= 0.05 + 0.05


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fig1e", "fig1f"])
def test_bias_runs_stay_bounded(name, runs):
    # direct stabilization: bounded x when ||s|| is bounded
    assert check_ultimate_boundedness(runs(name), builtin_scenario(name).checks["ultimate_bound"]).passed


def test_report_serialization(runs):
    report = verify_scenario(builtin_scenario("zero"), runs("zero"))
    import json

    d = json.loads(report.to_json())
    assert d["passed"] is True and d["scenario"] == "zero"
    assert "overall: PASS" in report.format_table()
