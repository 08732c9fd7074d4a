from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aacsim import numerics as nm
from aacsim.errors import DimensionMismatch, NonFiniteDerivative, NotPositiveDefinite, SingularSystem
from aacsim.plant import derivative, robot_arm_spec

P_ARM = np.array([[1.0, 0.5], [0.5, 1.0]])


def mp_lyapunov(Acl, Q):
    """Vectorized Lyapunov solve in 50-digit arithmetic."""
    mpmath.mp.dps = 50
    n = len(Acl)
    A = mpmath.matrix(Acl)
    L = mpmath.zeros(n * n, n * n)
    rhs = mpmath.zeros(n * n, 1)
    for j in range(n):
        for i in range(n):
            row = j * n + i  # column-major index of P[i, j]
            rhs[row] = -mpmath.mpf(Q[i][j])
            for k in range(n):
                L[row, j * n + k] += A[k, i]  # (A^T P)[i, j]
                L[row, k * n + i] += A[k, j]  # (P A)[i, j]
    sol = mpmath.lu_solve(L, rhs)
    return np.array([[float(sol[j * n + i]) for j in range(n)] for i in range(n)])


def test_lyapunov_arm_design():
    P = nm.solve_lyapunov([[0, 1], [-1, -2]], [[1, 1], [1, 3]])
    np.testing.assert_allclose(P, P_ARM, atol=1e-12)


def test_lyapunov_decoupled():
    np.testing.assert_allclose(nm.solve_lyapunov(-np.eye(2), 2 * np.eye(2)), np.eye(2), atol=1e-14)


def test_lyapunov_against_high_precision_oracle():
    Acl = [[0.0, 1.0], [-2.0, -3.0]]
    Q = [[1.0, 0.0], [0.0, 1.0]]
    P = nm.solve_lyapunov(Acl, Q)
    np.testing.assert_allclose(P, mp_lyapunov(Acl, Q), rtol=0, atol=1e-13)
    assert P == pytest.approx(np.array([[1.25, 0.25], [0.25, 0.25]]))


def test_lyapunov_oracle_3x3(rng):
    Acl = np.array([[0, 1, 0], [0, 0, 1], [-6, -11, -6.0]])
    Q = np.diag([1.0, 2.0, 3.0])
    np.testing.assert_allclose(nm.solve_lyapunov(Acl, Q), mp_lyapunov(Acl.tolist(), Q.tolist()), atol=1e-11)


def test_lyapunov_singular_and_indefinite():
    with pytest.raises(SingularSystem):
        nm.solve_lyapunov([[0, 1], [-1, 0]], np.eye(2))  # eigenvalues +-i sum to zero
    with pytest.raises(NotPositiveDefinite):
        nm.solve_lyapunov(np.eye(2), np.eye(2))  # anti-stable: P = -I/2
    with pytest.raises(DimensionMismatch):
        nm.solve_lyapunov(np.eye(2), np.eye(3))


@st.composite
def hurwitz(draw):
    n = draw(st.integers(1, 4))
    coeffs = st.floats(-2, 2, allow_nan=False)
    M = np.array(draw(st.lists(coeffs, min_size=n * n, max_size=n * n))).reshape(n, n)
    shift = max(np.linalg.eigvals(M).real.max(), 0.0) + draw(st.floats(0.2, 3))
    return M - shift * np.eye(n)


@settings(max_examples=60, deadline=None)
@given(hurwitz())
def test_lyapunov_residual_and_definiteness(Acl):
    n = Acl.shape[0]
    Q = np.eye(n) + 0.1 * np.ones((n, n))
    P = nm.solve_lyapunov(Acl, Q)
    assert nm.lyapunov_residual(Acl, P, Q) <= 1e-9 * nm.inf_norm(Q)
    assert nm.is_symmetric(P) and nm.is_positive_definite(P)
    for x in np.random.default_rng(0).normal(size=(20, n)):
        assert nm.quadratic_form(x, P) >= 0


def test_lyapunov_fast():
    import timeit

    per_call = min(timeit.repeat(lambda: nm.solve_lyapunov([[0, 1], [-1, -2]], [[1, 1], [1, 3]]), number=100, repeat=3)) / 100
    assert per_call < 1e-3


def test_mat_ops():
    assert nm.quadratic_form([1, 0], P_ARM) == 1
    assert nm.quadratic_form([1, 1], P_ARM) == 3
    assert nm.euclid_norm([3, 4]) == 5
    assert nm.inf_norm([[1, -2], [3, 4]]) == 7
    np.testing.assert_array_equal(nm.add(np.eye(2), np.eye(2)), 2 * np.eye(2))
    np.testing.assert_array_equal(nm.mul([[1, 2]], [[3], [4]]), [[11]])
    np.testing.assert_array_equal(nm.transpose([[1, 2]]), [[1], [2]])
    with pytest.raises(DimensionMismatch):
        nm.add(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        nm.mul(np.eye(2), np.ones((3, 1)))
    with pytest.raises(DimensionMismatch):
        nm.quadratic_form([1, 2, 3], P_ARM)


def test_rk4_constant():
    out = nm.rk4_step(lambda t, z: np.zeros_like(z), nm.OdeState(0.0, np.array([1.0, 2.0])), 0.1)
    np.testing.assert_array_equal(out.z, [1.0, 2.0])
    assert out.t == pytest.approx(0.1)


def test_rk4_decay_and_four_evaluations():
    calls = []

    def f(t, z):
        calls.append(t)
        return -z

    out = nm.rk4_step(f, nm.OdeState(0.0, np.array([1.0])), 0.1)
    assert abs(out.z[0] - math.exp(-0.1)) <= 1e-7
    assert calls == [0.0, 0.05, 0.05, 0.1]


@pytest.mark.parametrize("lam", [-1.0, -5.0])
def test_rk4_fifth_order_local_error(lam):
    def err(dt):
        z = nm.rk4_step(lambda t, z: lam * z, nm.OdeState(0.0, np.array([1.0])), dt).z[0]
        return abs(z - math.exp(lam * dt))

    for dt in (0.1, 0.05):
        assert err(dt) / err(dt / 2) >= 16 * 0.8


def test_rk4_nonfinite():
    with pytest.raises(NonFiniteDerivative):
        nm.rk4_step(lambda t, z: z * np.nan if t > 0 else z, nm.OdeState(0.0, np.array([1.0])), 0.1)


def _open_loop_arm(dt, t_end=1.0):
    spec = robot_arm_spec()
    state = nm.OdeState(0.0, np.array([math.pi / 4, 0.0]))
    for _ in range(int(round(t_end / dt))):
        state = nm.rk4_step(lambda t, x: derivative(spec, x, np.zeros(1), t, h=_ZERO_H), state, dt)
    return state.z


def _ZERO_H(x, t):
    return 0.0


def test_step_halving_open_loop_arm():
    coarse, fine = _open_loop_arm(1e-3), _open_loop_arm(1e-4)
    assert np.max(np.abs(coarse - fine)) <= 1e-6
