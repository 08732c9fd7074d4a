"""The built-in scenario library (robot-arm experiments).

The JSON files under ``scenarios/`` are the shipped artifacts; they are
generated by :func:`reference_scenarios` and checked against it in the tests.
"""
from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

import numpy as np

from ..approximator import RbfLayout
from ..controller import ControllerConfig
from ..errors import ScenarioError
from ..expressions import Signal
from ..inaccuracy import ActuatorFaultModel, MeasurementModel
from .scenario import PlantConfig, Scenario

SLOW = {"gamma": 2.0, "lam": 5.0}
FAST = {"gamma": 20.0, "lam": 50.0}

H_NOMINAL = "5*sin(x1)"
H_CHANGED = "5*sin(x1)+cos(x2)+x1^2"


def robot_arm_controller(gamma=2.0, lam=5.0, w_theta=0.5, w_lambda=0.2, omega=0.01) -> ControllerConfig:
    """K = [1 2], Q = [[1 1] [1 3]], ten diagonal Gaussian centers on [-0.5, 0.5], width 0.3."""
    rbf = RbfLayout.diagonal(count=10, low=-0.5, high=0.5, width=0.3, input_dim=2)
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    return ControllerConfig.design(
        A, B, K=[[1.0, 2.0]], Q=[[1.0, 1.0], [1.0, 3.0]], g=[[1.0]], rbf=rbf,
        gamma=np.full(rbf.n_weights, gamma), lam=lam,
        w_theta=w_theta, w_lambda=w_lambda, omega=omega,
    )


def _arm(name, description, rates=SLOW, measurement=None, actuator=None, h=((0.0, H_NOMINAL),),
         checks=None, x0=(math.pi / 4, 0.0), plant=None):
    return Scenario(
        name=name,
        description=description,
        plant=plant or PlantConfig(model="robot_arm", params={"J": 1.0, "B_damp": 2.0, "M": 1.0, "grav": 9.8, "l": 1.0}, h=h),
        controller=robot_arm_controller(**rates),
        measurement=measurement or MeasurementModel("accurate"),
        actuator=actuator or ActuatorFaultModel("none"),
        x0=x0,
        t_end=40.0,
        dt=1e-3,
        seed=20240101,
        log_every=10,
        checks=checks or {},
    )


def reference_scenarios():
    noise = MeasurementModel("additive_noise", variance=0.01)
    bias = MeasurementModel("additive_bias", bias=[1.0, 0.0], t_on=20.0)
    fading = MeasurementModel("multiplicative", xi_diag=[0.5, 0.5])
    converge = {"ultimate_bound": 0.05, "vc_descent": True}
    tracking = {"ultimate_bound": 1.5, "tracking_band": 0.15, "tracking_y": 0.1}
    out = []
    for suffix, rates, tag in (("", SLOW, "Gamma=2I, Lambda=5"), ("", FAST, "Gamma=20I, Lambda=50")):
        left = rates is SLOW
        out += [
            _arm("fig1a" if left else "fig1b", f"accurate measurement, {tag}", rates, checks=converge),
            _arm("fig1c" if left else "fig1d", f"zero-mean measurement noise, variance 0.01 per channel, {tag}",
                 rates, measurement=noise, checks={"ultimate_bound": 0.2 if left else 0.5}),
            _arm("fig1e" if left else "fig1f", f"constant sensor bias (1, 0) for t >= 20 s, {tag}",
                 rates, measurement=bias, checks=tracking),
            _arm("fig1g" if left else "fig1h", f"fading measurement y = 0.5 x, {tag}",
                 rates, measurement=fading, checks=converge),
        ]
    out += [
        _arm("fig4", "accurate measurement; h switches to 5 sin(x1) + cos(x2) + x1^2 at t = 20 s",
             h=((0.0, H_NOMINAL), (20.0, H_CHANGED)), checks={"ultimate_bound": 0.2}),
        _arm("fig5a", "additive actuator fault u + 0.5 sin(t)",
             actuator=ActuatorFaultModel("additive", signal=Signal("0.5*sin(t)"), t_on=0.0),
             checks={"ultimate_bound": 0.2}),
        _arm("fig5b", "multiplicative actuator fault 0.5 u",
             actuator=ActuatorFaultModel("multiplicative", factor=0.5, t_on=0.0),
             checks={"ultimate_bound": 0.2}),
        _arm("zero", "equilibrium sanity run: f = 0, h = 0, x0 = 0",
             plant=PlantConfig(model="chain", params={"n": 2, "g": 1.0}, h=((0.0, "0"),)),
             x0=(0.0, 0.0), checks={"ultimate_bound": 0.05, "vc_descent": True}),
    ]
    return out


def _scenario_dir():
    return resources.files(__package__) / "scenarios"


def builtin_names():
    return sorted(p.name[:-5] for p in _scenario_dir().iterdir() if p.name.endswith(".json"))


def builtin_scenario(name: str) -> Scenario:
    path = _scenario_dir() / f"{name}.json"
    if not path.is_file():
        raise ScenarioError(f"no builtin scenario {name!r}; known: {builtin_names()}")
    return Scenario.from_json(path.read_text())


def builtin_scenarios():
    return [builtin_scenario(name) for name in builtin_names()]


def write_builtin_files(directory) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for scn in reference_scenarios():
        path = directory / f"{scn.name}.json"
        scn.save(path)
        paths.append(path)
    return paths
