"""Adaptive approximation-based controller.

The control law is ``u = u0(y) + uc(y)`` where

* ``u0(y) = g^{-1} (-K y - sgn(B^T P y) eta_bar(y, t))`` is the nominal effort,
* ``uc(y) = -Pi(y) theta_hat - lambda_hat s(y)`` is the compensation effort,

and the estimates follow the sigma-modified gradient laws

* ``theta_hat' = Gamma Pi^T(y) p^T(y) - Gamma w_theta theta_hat``
* ``lambda_hat' = Lambda p(y) s(y) - w_lambda lambda_hat``

with ``p(y) = y^T P B g`` and ``s = tanh(p^T / omega)`` (or ``sgn(p^T)``).

Every function takes the measurement ``y`` the controller actually sees. Nothing
in this module knows whether ``y`` equals the true state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numerics
from .approximator import RbfLayout, basis_matrix
from .errors import DimensionMismatch, InvalidParameter, SingularGain
from .expressions import ZERO, Expression

ROBUST_MODES = ("tanh", "sgn")


@dataclass(frozen=True, eq=False)
class ControllerConfig:
    K: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    B: np.ndarray
    g: np.ndarray
    rbf: RbfLayout
    gamma: np.ndarray  # diagonal of the weight learning-rate matrix
    lam: float
    w_theta: float = 0.0
    w_lambda: float = 0.0
    omega: float = 0.01
    robust_mode: str = "tanh"
    eta_bar: Expression = ZERO
    theta_cap: float = 1e6

    def __post_init__(self):
        K = numerics.as_matrix(self.K, "K")
        Q = numerics.as_matrix(self.Q, "Q")
        P = numerics.as_matrix(self.P, "P")
        B = numerics.as_matrix(self.B, "B")
        g = numerics.as_matrix(self.g, "g")
        gamma = numerics.as_vector(self.gamma, "gamma")
        n = P.shape[0]
        m = self.rbf.output_dim
        if Q.shape != (n, n) or B.shape[0] != n or K.shape != (m, n):
            raise DimensionMismatch(f"inconsistent shapes K{K.shape} Q{Q.shape} P{P.shape} B{B.shape}")
        if g.shape != (B.shape[1], m):
            raise DimensionMismatch(f"g must be {B.shape[1]}x{m}, got {g.shape}")
        if self.rbf.input_dim != n:
            raise DimensionMismatch(f"RBF input_dim {self.rbf.input_dim} != state dim {n}")
        if gamma.shape != (self.rbf.n_weights,):
            raise DimensionMismatch(f"gamma has {gamma.size} entries, need {self.rbf.n_weights}")
        if not np.all(gamma > 0):
            raise InvalidParameter("Gamma must be positive definite")
        if not self.lam > 0:
            raise InvalidParameter("Lambda must be positive")
        if self.w_theta < 0 or self.w_lambda < 0:
            raise InvalidParameter("w_theta and w_lambda must be nonnegative")
        if self.robust_mode not in ROBUST_MODES:
            raise InvalidParameter(f"robust_mode must be one of {ROBUST_MODES}")
        if self.robust_mode == "tanh" and not self.omega > 0:
            raise InvalidParameter("tanh mode requires omega > 0")
        if self.robust_mode == "sgn" and (self.w_theta != 0 or self.w_lambda != 0):
            raise InvalidParameter("sgn mode requires w_theta = w_lambda = 0")
        for name, value in (("K", K), ("Q", Q), ("P", P), ("B", B), ("g", g), ("gamma", gamma)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "lam", float(self.lam))
        if g.shape[0] == g.shape[1]:
            try:
                g_inv = np.linalg.inv(g)
            except np.linalg.LinAlgError:
                g_inv = None
        else:
            g_inv = None
        object.__setattr__(self, "_g_inv", g_inv)
        object.__setattr__(self, "_PBg", P @ B @ g)
        # rows: nominal feedback -g^{-1} K, then (P B g)^T; one product yields u0 (eta-free part) and p
        if g_inv is not None:
            object.__setattr__(self, "_obs", np.vstack((-(g_inv @ K), (P @ B @ g).T)))
        object.__setattr__(self, "_theta_decay", gamma * self.w_theta)
        decay = np.append(self._theta_decay, self.w_lambda)
        decay.setflags(write=False)
        object.__setattr__(self, "_adapt_decay", decay)

    @classmethod
    def design(cls, A, B, K, Q, g, rbf, gamma, lam, **kwargs):
        """Build a config, solving ``(A - BK)^T P + P (A - BK) = -Q`` for ``P``."""
        A = numerics.as_matrix(A, "A")
        B = numerics.as_matrix(B, "B").reshape(A.shape[0], -1)
        K = numerics.as_matrix(K, "K")
        P = numerics.solve_lyapunov(A - B @ K, Q)
        return cls(K=K, Q=Q, P=P, B=B, g=g, rbf=rbf, gamma=gamma, lam=lam, **kwargs)

    @property
    def n_weights(self) -> int:
        return self.rbf.n_weights


@dataclass
class AdaptiveState:
    theta: np.ndarray
    lam: float = 0.0

    @classmethod
    def zeros(cls, cfg: ControllerConfig):
        return cls(np.zeros(cfg.n_weights), 0.0)


class MeasurementTerms(NamedTuple):
    """Everything the control law needs that depends on ``y`` alone."""

    u0: np.ndarray
    basis: np.ndarray
    p: np.ndarray
    s: np.ndarray
    theta_drive: np.ndarray  # Gamma Pi^T p^T
    lam_drive: float  # Lambda p s


def _sign(v):
    return np.sign(v)  # sign(0) == 0


def nominal_effort(cfg: ControllerConfig, y, t=0.0) -> np.ndarray:
    return _nominal(cfg, _measurement(cfg, y), t)


def _nominal(cfg, y, t):
    if cfg._g_inv is None:
        raise SingularGain("input gain g is not invertible")
    eta = cfg.eta_bar(y, t)
    if eta:
        return cfg._g_inv @ (-(cfg.K @ y) - _sign(cfg.B.T @ cfg.P @ y) * eta)
    return cfg._g_inv @ -(cfg.K @ y)


def p_of(cfg: ControllerConfig, y) -> np.ndarray:
    """Row vector ``y^T P B g`` (returned 1-D, length m)."""
    return _measurement(cfg, y) @ cfg._PBg


def robust_signal(cfg: ControllerConfig, p) -> np.ndarray:
    if cfg.robust_mode == "sgn":
        return _sign(p)
    return np.tanh(np.asarray(p, dtype=float) * (1.0 / cfg.omega))


def measurement_terms(cfg: ControllerConfig, y, t=0.0) -> MeasurementTerms:
    y = _measurement(cfg, y)
    if cfg._g_inv is None:
        raise SingularGain("input gain g is not invertible")
    m = cfg.rbf.output_dim
    fused = cfg._obs @ y
    p = fused[m:]
    u0 = fused[:m]
    eta = cfg.eta_bar(y, t)
    if eta:
        u0 = u0 - cfg._g_inv @ (_sign(cfg.B.T @ cfg.P @ y) * eta)
    s = robust_signal(cfg, p)
    basis = basis_matrix(cfg.rbf, y)
    return MeasurementTerms(
        u0=u0,
        basis=basis,
        p=p,
        s=s,
        theta_drive=cfg.gamma * p.dot(basis),
        lam_drive=cfg.lam * p.dot(s),
    )


def compensation_from_terms(terms: MeasurementTerms, theta, lam) -> np.ndarray:
    return -(terms.basis @ theta + lam * terms.s)


def control_from_terms(terms: MeasurementTerms, theta, lam) -> np.ndarray:
    """``u0 + uc`` for the held measurement terms and the current estimates."""
    return terms.u0 - (terms.basis @ theta + lam * terms.s)


def held_affine_form(cfg: ControllerConfig, terms: MeasurementTerms):
    """Control and adaptation laws as affine maps of ``a = [theta_hat; lambda_hat]``.

    With the measurement held, ``u = u0 - gain @ a`` and
    ``a' = drive - decay * a`` hold exactly. Returns ``(gain, drive, decay)``.
    """
    k = cfg.n_weights
    gain = np.empty((terms.basis.shape[0], k + 1))
    gain[:, :k] = terms.basis
    gain[:, k] = terms.s
    drive = np.empty(k + 1)
    drive[:k] = terms.theta_drive
    drive[k] = terms.lam_drive
    return gain, drive, cfg._adapt_decay


def adaptation_from_terms(cfg: ControllerConfig, terms: MeasurementTerms, theta, lam):
    return terms.theta_drive - cfg._theta_decay * theta, terms.lam_drive - cfg.w_lambda * lam


def compensation_effort(cfg: ControllerConfig, adapt: AdaptiveState, y) -> np.ndarray:
    theta = _weights(cfg, adapt.theta)
    return compensation_from_terms(measurement_terms(cfg, y), theta, adapt.lam)


def adaptation_derivatives(cfg: ControllerConfig, adapt: AdaptiveState, y):
    """Right-hand sides ``(theta_hat', lambda_hat')`` of the adaptation laws at ``y``."""
    theta = _weights(cfg, adapt.theta)
    return adaptation_from_terms(cfg, measurement_terms(cfg, y), theta, adapt.lam)


def total_control(cfg: ControllerConfig, adapt: AdaptiveState, y, t=0.0) -> np.ndarray:
    return control_from_terms(measurement_terms(cfg, y, t), _weights(cfg, adapt.theta), adapt.lam)


def lyapunov_V(cfg: ControllerConfig, x) -> float:
    return 0.5 * numerics.quadratic_form(x, cfg.P)


def lyapunov_Vc(cfg: ControllerConfig, x, adapt: AdaptiveState, theta_ref, lam_ref) -> float:
    """Augmented function ``V(x) + theta_err^T Gamma^-1 theta_err / 2 + lam_err^2 / (2 Lambda)``."""
    theta_err = _weights(cfg, adapt.theta) - _weights(cfg, theta_ref)
    lam_err = adapt.lam - lam_ref
    return (
        lyapunov_V(cfg, x)
        + 0.5 * float(np.sum(theta_err * theta_err / cfg.gamma))
        + lam_err * lam_err / (2.0 * cfg.lam)
    )


def _measurement(cfg, y):
    if not isinstance(y, np.ndarray) or y.dtype != float:
        y = np.asarray(y, dtype=float)
    if y.shape != (cfg.P.shape[0],):
        raise DimensionMismatch(f"measurement has shape {y.shape}, expected ({cfg.P.shape[0]},)")
    return y


def _weights(cfg, theta):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (cfg.n_weights,):
        raise DimensionMismatch(f"theta has shape {theta.shape}, expected ({cfg.n_weights},)")
    return theta
