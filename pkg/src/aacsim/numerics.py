"""Dense linear algebra helpers, the continuous Lyapunov solver and RK4.

Matrices are plain 2-D float64 numpy arrays; vectors are 1-D arrays.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionMismatch, NonFiniteDerivative, NotPositiveDefinite, SingularSystem

PD_TOL = 1e-10
SYM_TOL = 1e-12


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    return m


def as_vector(a, name="vector") -> np.ndarray:
    v = np.asarray(a, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    return v


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def add(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _check_same_shape(a, b)
    return a + b


def mul(a, b) -> np.ndarray:
    """Matrix (or matrix-vector) product with an explicit inner-dimension check."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a) -> np.ndarray:
    return as_matrix(a).T.copy()


def quadratic_form(x, P) -> float:
    """Return ``x^T P x``."""
    x = as_vector(x, "x")
    P = as_matrix(P, "P")
    if P.shape != (x.size, x.size):
        raise DimensionMismatch(f"x has length {x.size} but P is {P.shape}")
    return float(x @ P @ x)


def inf_norm(a) -> float:
    """Max-abs norm for vectors, max row sum for matrices."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    if a.ndim <= 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=1)))


def euclid_norm(x) -> float:
    return float(np.sqrt(np.sum(np.square(as_vector(x)))))


def is_symmetric(M, tol=SYM_TOL) -> bool:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        return False
    return bool(np.all(np.abs(M - M.T) <= tol * np.maximum(1.0, np.abs(M))))


def is_positive_definite(M, tol=PD_TOL) -> bool:
    """Leading-principal-minor test (Sylvester's criterion)."""
    M = as_matrix(M)
    n = M.shape[0]
    if M.shape != (n, n):
        return False
    return all(np.linalg.det(M[:k, :k]) > tol for k in range(1, n + 1))


def lyapunov_residual(Acl, P, Q) -> float:
    Acl, P, Q = as_matrix(Acl), as_matrix(P), as_matrix(Q)
    return inf_norm(Acl.T @ P + P @ Acl + Q)


def solve_lyapunov(Acl, Q) -> np.ndarray:
    """Solve ``Acl^T P + P Acl = -Q`` for symmetric positive-definite ``P``.

    The equation is vectorized with the Kronecker identity
    ``(I (x) Acl^T + Acl^T (x) I) vec(P) = -vec(Q)`` and solved by LU with
    partial pivoting. Intended for small ``n`` (the system is ``n^2 x n^2``).

    Raises
    ------
    SingularSystem
        If the vectorized system is numerically singular, which happens when
        ``Acl`` has eigenvalue pairs summing to (nearly) zero.
    NotPositiveDefinite
        If the solution fails the leading-minor test, i.e. ``Acl`` is not Hurwitz.
    """
    Acl = as_matrix(Acl, "Acl")
    Q = as_matrix(Q, "Q")
    n = Acl.shape[0]
    if Acl.shape != (n, n) or Q.shape != (n, n):
        raise DimensionMismatch(f"Acl {Acl.shape} and Q {Q.shape} must be square and equal")
    if not is_symmetric(Q):
        raise NotPositiveDefinite("Q must be symmetric")

    eye = np.eye(n)
    # column-major vec: vec(A X B) = (B^T kron A) vec(X)
    L = np.kron(eye, Acl.T) + np.kron(Acl.T, eye)
    rhs = -Q.reshape(-1, order="F")
    if np.linalg.cond(L) > 1e12:
        raise SingularSystem("Lyapunov operator is numerically singular (Acl not Hurwitz?)")
    try:
        vec_p = np.linalg.solve(L, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc

    P = vec_p.reshape(n, n, order="F")
    P = 0.5 * (P + P.T)
    if not is_positive_definite(P):
        raise NotPositiveDefinite("Lyapunov solution is not positive definite; Acl is not Hurwitz")
    return P


class OdeState(NamedTuple):
    t: float
    z: np.ndarray


def rk4_step(deriv: Callable[[float, np.ndarray], np.ndarray], state: OdeState, dt: float) -> OdeState:
    """Advance ``state`` by one classical fourth-order Runge-Kutta step.

    ``deriv`` is called exactly four times. Any piecewise-constant inputs it
    closes over must stay fixed for the whole step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t, z = state
    half = 0.5 * dt
    k1 = _checked(deriv(t, z), t)
    k2 = _checked(deriv(t + half, z + half * k1), t)
    k3 = _checked(deriv(t + half, z + half * k2), t)
    k4 = _checked(deriv(t + dt, z + dt * k3), t)
    return OdeState(t + dt, z + (dt / 6.0) * (k1 + k4 + 2.0 * (k2 + k3)))


_add_reduce = np.add.reduce


def _checked(dz, t):
    if not isinstance(dz, np.ndarray):
        dz = np.asarray(dz, dtype=float)
    # a single reduction is enough: any NaN/Inf entry poisons the sum
    if not math.isfinite(_add_reduce(dz)):
        raise NonFiniteDerivative(f"non-finite derivative in RK4 step starting at t={t:g}")
    return dz
