from __future__ import annotations

import math

import numpy as np
import pytest

from aacsim.errors import InvalidParameter
from aacsim.inaccuracy import (
    ActuatorFaultModel,
    MeasurementModel,
    apply_actuator_fault,
    measure,
    splitmix64,
    standard_normals,
    unit_uniform,
)

X = np.array([0.3, -0.4])


def test_splitmix64_reference_values():
    # first outputs of the reference splitmix64 generator seeded with 0
    assert splitmix64(0, 0) == 0xE220A8397B1DCDAF
    assert splitmix64(1, 0) == 0x6E789E6AA1B965F4
    assert 0.0 < unit_uniform(0, 0) <= 1.0


def test_accurate_and_bias():
    np.testing.assert_array_equal(measure(MeasurementModel(), X, 5.0), X)
    bias = MeasurementModel("additive_bias", bias=[1.0, 0.0], t_on=20.0)
    np.testing.assert_array_equal(measure(bias, X, 25.0), X + [1.0, 0.0])
    np.testing.assert_array_equal(measure(bias, X, 19.999), X)
    assert np.linalg.norm(bias.offset(20.0)) == 1.0 and np.linalg.norm(bias.offset(0.0)) == 0.0


def test_multiplicative():
    np.testing.assert_array_equal(measure(MeasurementModel("multiplicative", xi_diag=[0.5, 0.5]), X, 0.0), 0.5 * X)
    with pytest.raises(InvalidParameter):
        MeasurementModel("multiplicative", xi_diag=[0.5, 0.0])


def test_noise_is_pure_function_of_seed_and_step():
    m = MeasurementModel("additive_noise", variance=0.01, seed=42)
    a = measure(m, X, 0.0, step_index=7)
    assert measure(m, X, 3.0, step_index=7).tobytes() == a.tobytes()
    assert measure(m, X, 0.0, step_index=8).tobytes() != a.tobytes()
    other = MeasurementModel("additive_noise", variance=0.01, seed=43)
    assert measure(other, X, 0.0, step_index=7).tobytes() != a.tobytes()


def test_noise_statistics():
    n = 100_000
    var = 0.01
    w = np.concatenate([standard_normals(20240101, k, 2) for k in range(n // 2)]) * math.sqrt(var)
    assert abs(w.mean()) <= 4 * math.sqrt(var) / math.sqrt(n)
    assert abs(w.var() - var) <= 0.05 * var
    # the two channels of one step are uncorrelated
    pairs = w.reshape(-1, 2)
    assert abs(np.corrcoef(pairs.T)[0, 1]) < 4 / math.sqrt(pairs.shape[0])


def test_model_validation():
    with pytest.raises(InvalidParameter):
        MeasurementModel("gaussian")
    with pytest.raises(InvalidParameter):
        MeasurementModel("additive_noise", variance=-1.0)
    with pytest.raises(InvalidParameter):
        MeasurementModel("additive_bias")
    with pytest.raises(InvalidParameter):
        ActuatorFaultModel("multiplicative", factor=0.0)
    with pytest.raises(InvalidParameter):
        ActuatorFaultModel("additive")


def test_actuator_faults():
    u = np.array([1.25])
    np.testing.assert_array_equal(apply_actuator_fault(ActuatorFaultModel(), u, 1.0), u)
    add = ActuatorFaultModel("additive", signal="0.5*sin(t)")
    assert apply_actuator_fault(add, u, math.pi / 2)[0] == pytest.approx(1.75)
    mul = ActuatorFaultModel("multiplicative", factor=0.5, t_on=2.0)
    assert apply_actuator_fault(mul, u, 2.0)[0] == 0.625
    assert apply_actuator_fault(mul, u, 1.999)[0] == 1.25
