"""Adaptive approximation-based control under accurate and inaccurate measurements.

Simulation library for a Gaussian-RBF adaptive controller with
sigma-modified adaptation laws, plus measurement-inaccuracy and actuator
fault injection and empirical stability checks.
"""
from .approximator import RbfLayout
from .controller import AdaptiveState, ControllerConfig, total_control
from .harness import Scenario, builtin_scenario, builtin_scenarios, simulate
from .numerics import rk4_step, solve_lyapunov
from .plant import PlantSpec, robot_arm_spec

__version__ = "0.1.0"
