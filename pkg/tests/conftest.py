from __future__ import annotations

import functools

import numpy as np
import pytest

from aacsim.harness import builtin_scenario, simulate


@functools.lru_cache(maxsize=None)
def run_builtin(name: str, dt: float | None = None):
    """Full-horizon run of a built-in scenario, cached across the test session."""
    scn = builtin_scenario(name)
    if dt is not None:
        scn = scn.with_overrides(dt=dt, log_every=int(round(scn.log_every * scn.dt / dt)))
    return simulate(scn)


@pytest.fixture(scope="session")
def runs():
    return run_builtin


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
