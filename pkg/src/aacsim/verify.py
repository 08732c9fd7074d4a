"""Empirical stability checks on simulated trajectories.

"Ultimately" is operationalized as the last quarter of the horizon. Checks
are pure functions of a completed :class:`RunLog`; thresholds come from the
scenario's ``checks`` table.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .controller import AdaptiveState, ControllerConfig, lyapunov_Vc
from .errors import SimulationError, WrongScenarioKind
from .harness.runlog import RunLog
from .harness.scenario import Scenario
from .harness.simulate import simulate
from .numerics import lyapunov_residual

# solution of c = exp(-(c + 1)), rounded as commonly quoted
TANH_BOUND_C = 0.2785
LYAPUNOV_RESIDUAL_TOL = 1e-9
VC_SLACK = 1e-3
TRANSIENT_GROWTH = 10.0


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool


@dataclass
class BoundReport:
    scenario: str
    ultimate_bound_x: float = float("nan")
    ultimate_bound_theta: float = float("nan")
    ultimate_bound_lambda: float = float("nan")
    tracking_error: float = float("nan")
    checks: list = field(default_factory=list)
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and all(c.passed for c in self.checks)

    def add(self, name, value, threshold, passed):
        self.checks.append(CheckResult(name, float(value), float(threshold), bool(passed)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)

    def format_table(self) -> str:
        lines = [
            f"scenario: {self.scenario}",
            f"  sup|x| (tail)         {self.ultimate_bound_x:.6g}",
            f"  sup|theta-theta_T|    {self.ultimate_bound_theta:.6g}",
            f"  sup|lambda-lambda_T|  {self.ultimate_bound_lambda:.6g}",
            f"  sup|y| (tail)         {self.tracking_error:.6g}",
        ]
        if self.error:
            lines.append(f"  ERROR: {self.error}")
        width = max([len(c.name) for c in self.checks] + [5])
        lines.append(f"  {'check'.ljust(width)}  {'value':>12}  {'threshold':>12}  result")
        for c in self.checks:
            lines.append(f"  {c.name.ljust(width)}  {c.value:12.6g}  {c.threshold:12.6g}  {'PASS' if c.passed else 'FAIL'}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


# tanh bound: ||a|| - a^T tanh(a / b) <= n b c

def tanh_gap(a, b) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.linalg.norm(a) - a @ np.tanh(a / b))


def tanh_bound_margin(a, b, c=TANH_BOUND_C) -> float:
    """``n b c - (||a|| - a^T tanh(a/b))``; nonnegative when the bound holds."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return a.size * b * c - tanh_gap(a, b)


@dataclass
class TanhBoundResult:
    passed: bool
    worst_margin: float
    trials: int
    violations: int


def check_tanh_bound(trials=10_000, n_max=10, seed=0, c=TANH_BOUND_C, tol=1e-12) -> TanhBoundResult:
    """Random test of the tanh bound: ``a ~ U[-10, 10]^n``, ``b`` log-uniform on [1e-3, 10]."""
    rng = np.random.default_rng(seed)
    ns = rng.integers(1, n_max + 1, size=trials)
    bs = 10.0 ** rng.uniform(-3.0, 1.0, size=trials)
    worst = np.inf
    violations = 0
    for n in np.unique(ns):
        idx = np.flatnonzero(ns == n)
        a = rng.uniform(-10.0, 10.0, size=(idx.size, n))
        b = bs[idx]
        gap = np.linalg.norm(a, axis=1) - np.einsum("ij,ij->i", a, np.tanh(a / b[:, None]))
        margin = n * b * c - gap
        worst = min(worst, float(margin.min()))
        violations += int(np.count_nonzero(margin < -tol))
    return TanhBoundResult(passed=violations == 0, worst_margin=worst, trials=int(trials), violations=violations)


# trajectory checks

def _tail_sup(values, mask):
    return float(np.max(values[mask])) if np.any(mask) else float("nan")


def check_ultimate_boundedness(log: RunLog, threshold: float, report: BoundReport | None = None) -> BoundReport:
    """Pass iff sup ||x|| over the tail is within ``threshold`` and the run never
    grows past ``TRANSIENT_GROWTH`` times its initial transient peak."""
    report = report or BoundReport(log.name)
    tail = log.tail_mask()
    x_norm = log.x_norm
    sup_tail = _tail_sup(x_norm, tail)
    report.ultimate_bound_x = sup_tail
    report.ultimate_bound_theta = _tail_sup(np.linalg.norm(log.theta - log.theta[-1], axis=1), tail)
    report.ultimate_bound_lambda = _tail_sup(np.abs(log.lam - log.lam[-1]), tail)

    head = log.t <= log.t[0] + 0.25 * (log.t[-1] - log.t[0]) + 1e-12
    peak = float(np.max(x_norm[head]))
    overall = float(np.max(x_norm))
    finite = bool(np.isfinite(log.data).all())
    report.add("ultimate_bound_x", sup_tail, threshold, finite and sup_tail <= threshold)
    report.add("no_late_growth", overall, TRANSIENT_GROWTH * peak, finite and overall <= TRANSIENT_GROWTH * peak)
    return report


def check_indirect_tracking(log: RunLog, bias, band: float, y_bound: float | None = None,
                            report: BoundReport | None = None) -> BoundReport:
    """With ``y = x + s`` driven to zero the state settles near ``-s``.

    Pass iff sup ``||x + s||`` over the tail is at most ``band`` (and, when
    given, sup ``||y||`` is at most ``y_bound``).
    """
    if log.measurement_kind not in ("", "additive_bias", "accurate"):
        raise WrongScenarioKind(f"indirect tracking needs an additive bias run, got {log.measurement_kind!r}")
    bias = np.asarray(bias, dtype=float)
    if bias.shape != (log.n,):
        raise WrongScenarioKind(f"bias must have {log.n} entries")
    report = report or BoundReport(log.name)
    tail = log.tail_mask()
    err = _tail_sup(np.linalg.norm(log.x + bias, axis=1), tail)
    report.tracking_error = _tail_sup(np.linalg.norm(log.y, axis=1), tail)
    report.add("tracking_x_plus_bias", err, band, err <= band)
    if y_bound is not None:
        report.add("tracking_y", report.tracking_error, y_bound, report.tracking_error <= y_bound)
    return report


@dataclass
class ReferenceAnchor:
    theta_ref: np.ndarray
    lambda_ref: float


def reference_anchor(scn: Scenario, refine: int = 2) -> ReferenceAnchor:
    """Terminal estimates of the same scenario run at ``dt / refine``."""
    fine = scn.with_overrides(dt=scn.dt / refine, log_every=scn.log_every * refine)
    log = simulate(fine)
    return ReferenceAnchor(log.theta[-1].copy(), float(log.lam[-1]))


def vc_series(log: RunLog, cfg: ControllerConfig, anchor: ReferenceAnchor) -> np.ndarray:
    return np.array([
        lyapunov_Vc(cfg, x, AdaptiveState(th, la), anchor.theta_ref, anchor.lambda_ref)
        for x, th, la in zip(log.x, log.theta, log.lam)
    ])


@dataclass
class VcDescentResult:
    passed: bool
    fraction: float  # share of tail samples below the mid-horizon level + slack
    vc_mid: float
    vc_tail_sup: float


def check_vc_descent(log: RunLog, anchor: ReferenceAnchor, cfg: ControllerConfig,
                     slack: float = VC_SLACK) -> VcDescentResult:
    """Descent to a ball: sup of V_c over the tail must not exceed its mid-horizon value + ``slack``."""
    vc = vc_series(log, cfg, anchor)
    if not np.isfinite(vc).all():
        return VcDescentResult(False, 0.0, float("nan"), float("inf"))
    mid_t = log.t[0] + 0.5 * (log.t[-1] - log.t[0])
    mid = float(vc[np.searchsorted(log.t, mid_t - 1e-12)])
    tail = vc[log.tail_mask()]
    level = mid + slack
    return VcDescentResult(
        passed=bool(tail.max() <= level),
        fraction=float(np.mean(tail <= level)),
        vc_mid=mid,
        vc_tail_sup=float(tail.max()),
    )


def verify_scenario(scn: Scenario, log: RunLog | None = None) -> BoundReport:
    """Run ``scn`` (unless ``log`` is given) and apply every check in ``scn.checks``."""
    report = BoundReport(scn.name)
    cfg = scn.controller
    plant = scn.build_plant()
    residual = lyapunov_residual(plant.A - plant.B @ cfg.K, cfg.P, cfg.Q)
    report.add("lyapunov_residual", residual, LYAPUNOV_RESIDUAL_TOL, residual <= LYAPUNOV_RESIDUAL_TOL)
    try:
        log = log if log is not None else simulate(scn)
    except SimulationError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report

    checks = scn.checks
    check_ultimate_boundedness(log, checks.get("ultimate_bound", np.inf), report)
    if "tracking_band" in checks:
        bias = scn.measurement.bias if scn.measurement.kind == "additive_bias" else np.zeros(log.n)
        check_indirect_tracking(log, bias, checks["tracking_band"], checks.get("tracking_y"), report)
    elif "tracking_y" in checks:
        report.tracking_error = _tail_sup(np.linalg.norm(log.y, axis=1), log.tail_mask())
        report.add("tracking_y", report.tracking_error, checks["tracking_y"], report.tracking_error <= checks["tracking_y"])
    else:
        report.tracking_error = _tail_sup(np.linalg.norm(log.y, axis=1), log.tail_mask())
    if checks.get("vc_descent"):
        try:
            anchor = reference_anchor(scn)
        except SimulationError as exc:
            report.error = f"reference run failed: {exc}"
            return report
        vc = check_vc_descent(log, anchor, cfg, checks.get("vc_slack", VC_SLACK))
        report.add("vc_descent", vc.vc_tail_sup, vc.vc_mid + checks.get("vc_slack", VC_SLACK), vc.passed)
    return report
