"""Scenario definition and its JSON file format (one scenario per file)."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..approximator import RbfLayout
from ..controller import ControllerConfig
from ..errors import AacsimError, ScenarioError
from ..expressions import Expression, Signal
from ..inaccuracy import ActuatorFaultModel, MeasurementModel
from ..plant import HSchedule, PlantSpec, robot_arm_spec, zero_plant_spec

PLANT_MODELS = {
    "robot_arm": ("J", "B_damp", "M", "grav", "l"),
    "chain": ("n", "g"),
}
CHECK_KEYS = ("ultimate_bound", "tracking_band", "tracking_y", "vc_descent", "vc_slack")

_TOP_KEYS = {"name", "description", "plant", "controller", "measurement", "actuator",
             "x0", "t_end", "dt", "seed", "log_every", "checks"}
_PLANT_KEYS = {"model", "params", "eta", "h"}
_CONTROLLER_KEYS = {"K", "Q", "eta_bar", "rbf", "gamma", "lambda_rate", "w_theta", "w_lambda",
                    "omega", "robust_mode", "theta_cap", "theta0", "lambda0"}
_MEASUREMENT_KEYS = {
    "accurate": {"kind"},
    "additive_noise": {"kind", "variance"},
    "additive_bias": {"kind", "bias", "t_on"},
    "multiplicative": {"kind", "xi_diag"},
}
_ACTUATOR_KEYS = {
    "none": {"kind"},
    "additive": {"kind", "signal", "t_on"},
    "multiplicative": {"kind", "factor", "t_on"},
}


@dataclass(frozen=True)
class PlantConfig:
    """Serializable plant description; ``build()`` turns it into a :class:`PlantSpec`."""

    model: str = "robot_arm"
    params: dict = field(default_factory=lambda: {"J": 1.0, "B_damp": 2.0, "M": 1.0, "grav": 9.8, "l": 1.0})
    h: tuple = ((0.0, "0"),)
    eta: str = "0"

    def __post_init__(self):
        if self.model not in PLANT_MODELS:
            raise ScenarioError(f"unknown plant model {self.model!r}; known: {sorted(PLANT_MODELS)}")
        _reject_unknown(self.params, set(PLANT_MODELS[self.model]), f"plant.params ({self.model})")
        object.__setattr__(self, "h", tuple((float(t0), str(e)) for t0, e in self.h))

    def build(self) -> PlantSpec:
        schedule = HSchedule(self.h)
        if self.model == "robot_arm":
            spec = robot_arm_spec(h_schedule=schedule, **self.params)
        else:
            spec = zero_plant_spec(n=int(self.params.get("n", 2)), g=self.params.get("g", 1.0), h_schedule=schedule)
        if self.eta != "0":
            spec = dataclasses.replace(spec, eta=Expression(self.eta))
        return spec


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    plant: PlantConfig
    controller: ControllerConfig
    measurement: MeasurementModel
    actuator: ActuatorFaultModel
    x0: np.ndarray
    t_end: float = 40.0
    dt: float = 1e-3
    seed: int = 0
    log_every: int = 10
    theta0: np.ndarray = None
    lambda0: float = 0.0
    checks: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float).reshape(-1)
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        theta0 = np.zeros(self.controller.n_weights) if self.theta0 is None else np.array(self.theta0, dtype=float)
        theta0.setflags(write=False)
        object.__setattr__(self, "theta0", theta0)
        if theta0.shape != (self.controller.n_weights,):
            raise ScenarioError(f"theta0 must have {self.controller.n_weights} entries")
        if x0.shape != (self.controller.P.shape[0],):
            raise ScenarioError(f"x0 must have {self.controller.P.shape[0]} entries")
        if not self.dt > 0:
            raise ScenarioError("dt must be positive")
        if not self.t_end > 0 or not self._on_grid(self.t_end):
            raise ScenarioError(f"t_end={self.t_end} must be a positive multiple of dt={self.dt}")
        if not isinstance(self.log_every, int) or self.log_every < 1:
            raise ScenarioError("log_every must be a positive integer")
        for t_event, what in self.event_times():
            if not self._on_grid(t_event):
                raise ScenarioError(f"event {what} at t={t_event} is not on the dt grid")
        _reject_unknown(self.checks, set(CHECK_KEYS), "checks")
        if self.measurement.seed != self.seed:
            object.__setattr__(self, "measurement", dataclasses.replace(self.measurement, seed=self.seed))

    def _on_grid(self, t) -> bool:
        k = round(t / self.dt)
        return abs(k * self.dt - t) <= 1e-9 * max(1.0, abs(t))

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)

    def time_at(self, step: int) -> float:
        return round(step * self.dt, 12)

    def event_times(self):
        events = []
        if self.measurement.kind == "additive_bias":
            events.append((self.measurement.t_on, "bias_on"))
        if self.actuator.kind != "none":
            events.append((self.actuator.t_on, "actuator_fault_on"))
        for t0, expr in self.plant.h[1:]:
            events.append((t0, f"h_switch:{expr}"))
        return sorted(events)

    def build_plant(self) -> PlantSpec:
        return self.plant.build()

    def with_overrides(self, dt=None, t_end=None, seed=None, **changes):
        if dt is not None:
            changes["dt"] = float(dt)
        if t_end is not None:
            changes["t_end"] = float(t_end)
        if seed is not None:
            changes["seed"] = int(seed)
        return dataclasses.replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    # serialization

    def to_dict(self) -> dict:
        cfg = self.controller
        controller = {
            "K": cfg.K.tolist(),
            "Q": cfg.Q.tolist(),
            "eta_bar": cfg.eta_bar.name,
            "rbf": {"centers": [c.tolist() for c in cfg.rbf.centers], "width": cfg.rbf.width},
            "gamma": cfg.gamma.tolist(),
            "lambda_rate": cfg.lam,
            "w_theta": cfg.w_theta,
            "w_lambda": cfg.w_lambda,
            "omega": cfg.omega,
            "robust_mode": cfg.robust_mode,
            "theta_cap": cfg.theta_cap,
            "theta0": self.theta0.tolist(),
            "lambda0": self.lambda0,
        }
        m = self.measurement
        measurement = {"kind": m.kind}
        if m.kind == "additive_noise":
            measurement["variance"] = m.variance
        elif m.kind == "additive_bias":
            measurement.update(bias=m.bias.tolist(), t_on=m.t_on)
        elif m.kind == "multiplicative":
            measurement["xi_diag"] = m.xi_diag.tolist()
        a = self.actuator
        actuator = {"kind": a.kind}
        if a.kind == "additive":
            actuator.update(signal=a.signal.name, t_on=a.t_on)
        elif a.kind == "multiplicative":
            actuator.update(factor=a.factor, t_on=a.t_on)
        return {
            "name": self.name,
            "description": self.description,
            "plant": {
                "model": self.plant.model,
                "params": dict(self.plant.params),
                "eta": self.plant.eta,
                "h": [{"t_start": t0, "expr": e} for t0, e in self.plant.h],
            },
            "controller": controller,
            "measurement": measurement,
            "actuator": actuator,
            "x0": self.x0.tolist(),
            "t_end": self.t_end,
            "dt": self.dt,
            "seed": self.seed,
            "log_every": self.log_every,
            "checks": dict(self.checks),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            return cls._from_dict(d)
        except ScenarioError:
            raise
        except (AacsimError, KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"invalid scenario: {exc}") from exc

    @classmethod
    def _from_dict(cls, d):
        _reject_unknown(d, _TOP_KEYS, "scenario")
        pd = d["plant"]
        _reject_unknown(pd, _PLANT_KEYS, "plant")
        for seg in pd.get("h", []):
            _reject_unknown(seg, {"t_start", "expr"}, "plant.h[]")
        plant = PlantConfig(
            model=pd.get("model", "robot_arm"),
            params=dict(pd.get("params", {})),
            h=tuple((s["t_start"], s["expr"]) for s in pd.get("h", [{"t_start": 0.0, "expr": "0"}])),
            eta=pd.get("eta", "0"),
        )
        spec = plant.build()

        cd = d["controller"]
        _reject_unknown(cd, _CONTROLLER_KEYS, "controller")
        _reject_unknown(cd["rbf"], {"centers", "width"}, "controller.rbf")
        rbf = RbfLayout(centers=tuple(np.array(c, dtype=float) for c in cd["rbf"]["centers"]), width=cd["rbf"]["width"])
        controller = ControllerConfig.design(
            spec.A, spec.B, cd["K"], cd["Q"], [[spec.g]], rbf,
            gamma=cd["gamma"],
            lam=cd["lambda_rate"],
            w_theta=cd.get("w_theta", 0.0),
            w_lambda=cd.get("w_lambda", 0.0),
            omega=cd.get("omega", 0.01),
            robust_mode=cd.get("robust_mode", "tanh"),
            eta_bar=Expression(cd.get("eta_bar", "0")),
            theta_cap=cd.get("theta_cap", 1e6),
        )

        seed = int(d.get("seed", 0))
        md = d.get("measurement", {"kind": "accurate"})
        kind = md.get("kind")
        if kind not in _MEASUREMENT_KEYS:
            raise ScenarioError(f"unknown measurement kind {kind!r}")
        _reject_unknown(md, _MEASUREMENT_KEYS[kind], f"measurement ({kind})")
        measurement = MeasurementModel(
            kind=kind,
            variance=md.get("variance", 0.0),
            seed=seed,
            bias=md.get("bias"),
            t_on=md.get("t_on", 0.0),
            xi_diag=md.get("xi_diag"),
        )

        ad = d.get("actuator", {"kind": "none"})
        akind = ad.get("kind")
        if akind not in _ACTUATOR_KEYS:
            raise ScenarioError(f"unknown actuator kind {akind!r}")
        _reject_unknown(ad, _ACTUATOR_KEYS[akind], f"actuator ({akind})")
        actuator = ActuatorFaultModel(
            kind=akind,
            signal=Signal(ad["signal"]) if "signal" in ad else None,
            factor=ad.get("factor", 1.0),
            t_on=ad.get("t_on", 0.0),
        )

        return cls(
            name=d["name"],
            description=d.get("description", ""),
            plant=plant,
            controller=controller,
            measurement=measurement,
            actuator=actuator,
            x0=d["x0"],
            t_end=float(d.get("t_end", 40.0)),
            dt=float(d.get("dt", 1e-3)),
            seed=seed,
            log_every=int(d.get("log_every", 10)),
            theta0=cd.get("theta0"),
            lambda0=float(cd.get("lambda0", 0.0)),
            checks=dict(d.get("checks", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "Scenario":
        return cls.from_json(Path(path).read_text())


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise ScenarioError(f"{where} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ScenarioError(f"unknown keys in {where}: {sorted(extra)}")
