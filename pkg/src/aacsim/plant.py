"""Companion-form plants ``x' = A x + B [f(x) + g u + eta(x, t) + h(x, t)]``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, InvalidParameter
from .expressions import ZERO, Expression


def companion(n: int):
    """Shift matrix ``A`` and input vector ``B = e_n`` of the canonical form."""
    A = np.eye(n, k=1)
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    return A, B


@dataclass(frozen=True)
class HSchedule:
    """Piecewise-in-time unknown dynamics; segment ``i`` is active on ``[t_i, t_{i+1})``."""

    segments: tuple  # of (t_start, Expression)

    def __post_init__(self):
        segs = tuple((float(t0), h if isinstance(h, Expression) else Expression(h)) for t0, h in self.segments)
        if not segs or segs[0][0] != 0.0:
            raise InvalidParameter("first h segment must start at t = 0")
        starts = [t0 for t0, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise InvalidParameter(f"segment start times must be strictly increasing: {starts}")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, h=ZERO):
        return cls(((0.0, h),))

    def active(self, t) -> Expression:
        current = self.segments[0][1]
        for t0, h in self.segments:
            if t >= t0:
                current = h
            else:
                break
        return current

    @property
    def switch_times(self):
        return [t0 for t0, _ in self.segments[1:]]


@dataclass(frozen=True, eq=False)
class PlantSpec:
    n: int
    f: Callable
    g: float
    eta: Callable = ZERO
    h_schedule: HSchedule = None
    A: np.ndarray = None
    B: np.ndarray = None
    m: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("state dimension must be at least 1")
        if self.m != 1:
            raise InvalidParameter("only single-input plants are supported")
        if not (np.isfinite(self.g) and self.g != 0):
            raise InvalidParameter("input gain g must be finite and nonzero")
        A0, B0 = companion(self.n)
        for name, given, expected in (("A", self.A, A0), ("B", self.B, B0)):
            if given is not None and not np.array_equal(np.asarray(given, dtype=float).reshape(expected.shape), expected):
                raise InvalidParameter(f"{name} must have the companion (chain of integrators) structure")
        A0.setflags(write=False)
        B0.setflags(write=False)
        object.__setattr__(self, "A", A0)
        object.__setattr__(self, "B", B0)
        object.__setattr__(self, "g", float(self.g))
        if not isinstance(self.eta, Expression):
            object.__setattr__(self, "eta", Expression("<custom>", self.eta))
        if self.h_schedule is None:
            object.__setattr__(self, "h_schedule", HSchedule.constant())


def derivative(spec: PlantSpec, x, u_applied, t, h=None, out=None) -> np.ndarray:
    """State derivative for an already fault-corrupted input.

    ``h`` overrides the schedule lookup; the simulator uses it to hold the
    active segment fixed across the substeps of one integration step.
    ``out`` is an optional length-n buffer to write the result into.
    """
    if not isinstance(x, np.ndarray):
        x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({spec.n},)")
    u = u_applied[0] if isinstance(u_applied, np.ndarray) else float(np.ravel(u_applied)[0])
    if h is None:
        h = spec.h_schedule.active(t)
    xdot = np.empty(spec.n) if out is None else out
    xdot[:-1] = x[1:]
    xdot[-1] = spec.f(x, t) + spec.g * u + spec.eta.fn(x, t) + getattr(h, "fn", h)(x, t)
    return xdot


def robot_arm_spec(J=1.0, B_damp=2.0, M=1.0, grav=9.8, l=1.0, h_schedule=None) -> PlantSpec:
    """Single-link robot arm: ``x1' = x2``, ``x2' = -(M grav l / J) sin x1 - (B/J) x2 + u / J``."""
    if not J > 0:
        raise InvalidParameter(f"inertia J must be positive, got {J}")
    stiff = M * grav * l / J
    damp = B_damp / J

    def f(x, t=0.0):
        return -stiff * math.sin(x[0]) - damp * x[1]

    return PlantSpec(n=2, f=f, g=1.0 / J, h_schedule=h_schedule)


def zero_plant_spec(n=2, g=1.0, h_schedule=None) -> PlantSpec:
    """Pure chain of integrators (``f = 0``)."""
    return PlantSpec(n=n, f=ZERO, g=g, h_schedule=h_schedule)
