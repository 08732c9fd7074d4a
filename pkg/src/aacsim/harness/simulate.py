"""Closed-loop driver: plant + measurement model + controller + actuator faults."""
from __future__ import annotations

import numpy as np

from .. import controller as ctl
from ..errors import CapExceeded, NonFinite, NonFiniteDerivative
from ..inaccuracy import apply_actuator_fault, measure
from ..numerics import OdeState, rk4_step
from ..plant import derivative
from .runlog import RunLog
from .scenario import Scenario


def simulate(scn: Scenario) -> RunLog:
    """Integrate the augmented state ``[x; theta_hat; lambda_hat]`` with fixed-step RK4.

    Per step the measurement, the controller's measurement-only terms, the
    actuator fault signal and the active ``h`` segment are evaluated at the
    step start and held for all four substeps.

    Raises
    ------
    NonFinite
        The closed loop produced NaN/Inf.
    CapExceeded
        ``||theta_hat||`` exceeded the controller's ``theta_cap``.
    """
    plant = scn.build_plant()
    cfg = scn.controller
    measurement = scn.measurement
    actuator = scn.actuator
    n, m, k = plant.n, cfg.rbf.output_dim, cfg.n_weights
    dt = scn.dt
    n_steps = scn.n_steps
    log_every = scn.log_every
    half_P = 0.5 * cfg.P
    cap_sq = cfg.theta_cap**2

    z = np.concatenate([scn.x0, scn.theta0, [scn.lambda0]])
    n_rows = n_steps // log_every + 1 + (n_steps % log_every != 0)
    data = np.empty((n_rows, 1 + 2 * n + 3 * m + k + 3))
    row = 0

    for step in range(n_steps + 1):
        t = scn.time_at(step)
        x = z[:n]
        y = measure(measurement, x, t, step)
        terms = ctl.measurement_terms(cfg, y, t)

        if step % log_every == 0 or step == n_steps:
            theta, lam = z[n:n + k], z[-1]
            uc = ctl.compensation_from_terms(terms, theta, lam)
            data[row] = np.concatenate([
                [t], x, y, terms.u0 + uc, terms.u0, uc, theta,
                [lam, x @ half_P @ x, np.sqrt(x @ x)],
            ])
            row += 1
            if step == n_steps:
                break

        h = plant.h_schedule.active(t)
        gain, drive, decay = ctl.held_affine_form(cfg, terms)

        def closed_loop(tau, zz, t_hold=t, h=h, gain=gain, drive=drive, decay=decay, u0=terms.u0):
            adapt = zz[n:]
            u_applied = apply_actuator_fault(actuator, u0 - gain.dot(adapt), t_hold)
            out = np.empty_like(zz)
            out[n:] = drive - decay * adapt
            derivative(plant, zz[:n], u_applied, tau, h=h, out=out[:n])
            return out

        try:
            z = rk4_step(closed_loop, OdeState(t, z), dt).z
        except NonFiniteDerivative:
            raise NonFinite("closed loop produced a non-finite derivative", t) from None
        theta = z[n:n + k]
        if theta.dot(theta) > cap_sq:
            raise CapExceeded(f"||theta_hat|| exceeded cap {cfg.theta_cap:g}", scn.time_at(step + 1))

    return RunLog(n=n, m=m, k=k, data=data, events=list(scn.event_times()), name=scn.name,
                  measurement_kind=measurement.kind)
