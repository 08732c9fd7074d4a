"""Exception hierarchy shared across the package."""


class AacsimError(Exception):
    """Base class for all errors raised by aacsim."""


class DimensionMismatch(AacsimError, ValueError):
    pass


class SingularSystem(AacsimError, ArithmeticError):
    pass


class NotPositiveDefinite(AacsimError, ArithmeticError):
    pass


class NonFiniteDerivative(AacsimError, ArithmeticError):
    pass


class SingularGain(AacsimError, ValueError):
    pass


class InvalidParameter(AacsimError, ValueError):
    pass


class ScenarioError(AacsimError, ValueError):
    """Malformed scenario file or inconsistent scenario settings."""


class WrongScenarioKind(AacsimError, ValueError):
    pass


class SimulationError(AacsimError, RuntimeError):
    """A closed-loop run was aborted; ``t`` is the simulation time of the abort."""

    def __init__(self, message, t):
        super().__init__(f"{message} (t={t:g})")
        self.t = t


class NonFinite(SimulationError):
    pass


class CapExceeded(SimulationError):
    pass
