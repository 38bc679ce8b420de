"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class RotorOptomechanicsError(Exception):
    """Base class for all library errors."""
    exit_code = 1


class DomainError(RotorOptomechanicsError, ValueError):
    """An argument lies outside the domain of the operation."""
    exit_code = 1


class ConfigurationError(RotorOptomechanicsError, ValueError):
    """Invalid configuration: bad config file, step size, sample counts."""
    exit_code = 1


class ResourceError(RotorOptomechanicsError):
    """The requested problem size exceeds what the solver supports."""
    exit_code = 1


class AntiTrappingError(RotorOptomechanicsError):
    """The light shift removes the harmonic confinement (eta^2 < 0)."""
    exit_code = 2


class StabilityError(RotorOptomechanicsError):
    """The linearized dynamics are not stable."""
    exit_code = 2


class RegimeError(RotorOptomechanicsError):
    """Parameters violate the harmonic-rotor validity window (strict mode)."""
    exit_code = 2


class PoleError(RotorOptomechanicsError, ArithmeticError):
    """Evaluation exactly at an undamped pole."""
    exit_code = 3


class DivergenceError(RotorOptomechanicsError, ArithmeticError):
    """A trajectory produced a non-finite state."""
    exit_code = 3

    def __init__(self, message: str, step_index: int):
        super().__init__(message)
        self.step_index = step_index


class NumericalError(RotorOptomechanicsError):
    """A numerical routine failed to converge."""
    exit_code = 3
