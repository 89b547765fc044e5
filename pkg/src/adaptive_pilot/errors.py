"""Exception types raised across the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SimulationError, ValueError):
    """A configuration value violates its documented range."""


class InsufficientBits(SimulationError):
    pass


class LayoutInvalid(SimulationError, ValueError):
    pass


class LengthMismatch(SimulationError, ValueError):
    pass


class SingularEstimate(SimulationError):
    pass


class EmptyPilots(SimulationError, ValueError):
    pass


class ZeroPilotSymbol(SimulationError, ValueError):
    pass


class NonPositiveSymbolTime(SimulationError, ValueError):
    pass


class ZeroEnergy(SimulationError, ValueError):
    pass


class IndexOutOfRange(SimulationError, IndexError):
    pass
