"""Named function registry for scenario files.

Scenario files refer to nonlinearities and fault signals by name; only the
forms listed here are accepted (there is deliberately no expression parser).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ScenarioError


@dataclass(frozen=True)
class Expression:
    """A named scalar function ``fn(x, t)`` of the state vector and time."""

    name: str
    fn: Callable = None

    def __post_init__(self):
        if self.fn is None:
            object.__setattr__(self, "fn", _lookup(STATE_FUNCTIONS, self.name))

    def __call__(self, x, t=0.0) -> float:
        return self.fn(x, t)

    def __eq__(self, other):
        return isinstance(other, Expression) and other.name == self.name

    def __hash__(self):
        return hash(self.name)


@dataclass(frozen=True)
class Signal:
    """A named scalar function of time only (actuator fault injections)."""

    name: str
    fn: Callable = None

    def __post_init__(self):
        if self.fn is None:
            object.__setattr__(self, "fn", _lookup(TIME_SIGNALS, self.name))

    def __call__(self, t) -> float:
        return self.fn(t)

    def __eq__(self, other):
        return isinstance(other, Signal) and other.name == self.name

    def __hash__(self):
        return hash(self.name)


def _zero(x, t):
    return 0.0


STATE_FUNCTIONS = {
    "0": _zero,
    "5*sin(x1)": lambda x, t: 5.0 * math.sin(x[0]),
    "5*sin(x1)+cos(x2)+x1^2": lambda x, t: 5.0 * math.sin(x[0]) + math.cos(x[1]) + x[0] * x[0],
    "1": lambda x, t: 1.0,
}

TIME_SIGNALS = {
    "0": lambda t: 0.0,
    "0.5*sin(t)": lambda t: 0.5 * math.sin(t),
}


def _lookup(table, name):
    try:
        return table[name]
    except KeyError:
        raise ScenarioError(f"unknown function {name!r}; known: {sorted(table)}") from None


ZERO = Expression("0")
