"""Measurement inaccuracy and actuator fault models.

All models are deterministic: noise draws are a pure function of
``(seed, step_index, channel)`` via a counter-based splitmix64 stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .expressions import Signal

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

MEASUREMENT_KINDS = ("accurate", "additive_noise", "additive_bias", "multiplicative")
ACTUATOR_KINDS = ("none", "additive", "multiplicative")


def splitmix64(counter: int, seed: int) -> int:
    """Output number ``counter`` (0-based) of the splitmix64 stream seeded with ``seed``."""
    z = (seed + (counter + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def unit_uniform(counter: int, seed: int) -> float:
    """Uniform draw on (0, 1] from the top 53 bits."""
    return ((splitmix64(counter, seed) >> 11) + 1) * 2.0**-53


def standard_normals(seed: int, step_index: int, n: int) -> np.ndarray:
    """``n`` independent N(0, 1) draws for one control step (Box-Muller)."""
    pairs = (n + 1) // 2
    base = step_index * 2 * pairs
    out = np.empty(2 * pairs)
    for i in range(pairs):
        u1 = unit_uniform(base + 2 * i, seed)
        u2 = unit_uniform(base + 2 * i + 1, seed)
        r = math.sqrt(-2.0 * math.log(u1))
        out[2 * i] = r * math.cos(2.0 * math.pi * u2)
        out[2 * i + 1] = r * math.sin(2.0 * math.pi * u2)
    return out[:n]


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    kind: str = "accurate"
    variance: float = 0.0
    seed: int = 0
    bias: np.ndarray = None
    t_on: float = 0.0
    xi_diag: np.ndarray = None

    def __post_init__(self):
        if self.kind not in MEASUREMENT_KINDS:
            raise InvalidParameter(f"measurement kind must be one of {MEASUREMENT_KINDS}, got {self.kind!r}")
        if self.kind == "additive_noise" and not self.variance >= 0:
            raise InvalidParameter("noise variance must be nonnegative")
        if self.kind == "additive_bias":
            if self.bias is None:
                raise InvalidParameter("additive_bias needs a bias vector")
            object.__setattr__(self, "bias", _frozen(self.bias))
        if self.kind == "multiplicative":
            if self.xi_diag is None:
                raise InvalidParameter("multiplicative needs xi_diag")
            xi = _frozen(self.xi_diag)
            if np.any(xi == 0):
                raise InvalidParameter("xi_diag entries must be nonzero")
            object.__setattr__(self, "xi_diag", xi)
        if not 0 <= self.seed <= MASK64:
            raise InvalidParameter("seed must be an unsigned 64-bit integer")

    def __eq__(self, other):
        if not isinstance(other, MeasurementModel):
            return NotImplemented
        return (
            (self.kind, self.variance, self.seed, self.t_on) == (other.kind, other.variance, other.seed, other.t_on)
            and _arr_eq(self.bias, other.bias)
            and _arr_eq(self.xi_diag, other.xi_diag)
        )

    def offset(self, t) -> np.ndarray | None:
        """Additive bias ``s(t)`` for the bias model, ``None`` for other kinds."""
        if self.kind != "additive_bias":
            return None
        return self.bias if t >= self.t_on else np.zeros_like(self.bias)


def measure(model: MeasurementModel, x, t, step_index: int = 0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    kind = model.kind
    if kind == "accurate":
        return x.copy()
    if kind == "additive_bias":
        return x + model.offset(t)
    if kind == "additive_noise":
        if model.variance == 0:
            return x.copy()
        return x + math.sqrt(model.variance) * standard_normals(model.seed, step_index, x.size)
    return model.xi_diag * x


@dataclass(frozen=True)
class ActuatorFaultModel:
    kind: str = "none"
    signal: Signal = None
    factor: float = 1.0
    t_on: float = 0.0

    def __post_init__(self):
        if self.kind not in ACTUATOR_KINDS:
            raise InvalidParameter(f"actuator kind must be one of {ACTUATOR_KINDS}, got {self.kind!r}")
        if self.kind == "additive":
            if self.signal is None:
                raise InvalidParameter("additive actuator fault needs a signal")
            if not isinstance(self.signal, Signal):
                object.__setattr__(self, "signal", Signal(self.signal))
        if self.kind == "multiplicative" and self.factor == 0:
            raise InvalidParameter("multiplicative fault factor must be nonzero")


def apply_actuator_fault(model: ActuatorFaultModel, u, t) -> np.ndarray:
    if not isinstance(u, np.ndarray):
        u = np.asarray(u, dtype=float)
    if model.kind == "none" or t < model.t_on:
        return u
    if model.kind == "additive":
        return u + model.signal(t)
    return model.factor * u


def _frozen(v):
    a = np.array(v, dtype=float).reshape(-1)
    a.setflags(write=False)
    return a


def _arr_eq(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)
