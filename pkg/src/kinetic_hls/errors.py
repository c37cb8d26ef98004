"""Exception hierarchy shared by all modules.

The CLI maps :class:`ValidationError` subclasses to exit code 1 and
:class:`AcceptanceFailure` subclasses to exit code 2.
"""


class KineticError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(KineticError):
    """Bad input: configuration, domain or range problems."""


class ConfigurationError(ValidationError):
    """Invalid construction parameters (grid sizes, quadrature orders, config keys)."""

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
        self.detail = message


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(ValidationError):
    """Data would leave the computational box (support or wrap-around)."""


class ResolutionError(ValidationError):
    """Quadrature too coarse for the requested oscillatory integral."""


class AcceptanceFailure(KineticError):
    """A numerical self-check failed at run time."""


class DivergenceError(AcceptanceFailure):
    """Fixed-point iteration is not contracting."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class MonotonicityError(AcceptanceFailure):
    """Kaniel-Shinbrot ordering violated beyond tolerance."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(AcceptanceFailure):
    """Iteration budget exhausted before reaching the tolerance."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])
