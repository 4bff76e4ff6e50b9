"""Exception types shared across the package."""


class HorseshoeError(Exception):
    """Base class for all errors raised by hhorseshoe."""


class ConstraintViolation(HorseshoeError, ValueError):
    """A map parameter lies outside its admissible range."""

    def __init__(self, name, value, bound):
        self.name = name
        self.value = value
        self.bound = bound
        super().__init__(f"{name}={value!r} violates {name}{bound}")


class DomainError(HorseshoeError, ValueError):
    """An argument lies outside the domain of a map."""


class Escaped(HorseshoeError):
    """The orbit left the cube R (or sat in the gap between R0 and R1)."""

    def __init__(self, reason, point=None):
        self.reason = reason
        self.point = point
        super().__init__(reason)


class LimitExceeded(HorseshoeError, ValueError):
    """A requested size exceeds a configured enumeration cap."""


class PatternError(HorseshoeError, ValueError):
    """A word does not have the block structure an operation requires."""


class NonAdmissible(HorseshoeError, ValueError):
    """A word contains a forbidden factor (or wraps onto one)."""


class ConvergenceFailure(HorseshoeError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``bracket`` carries the last available enclosure, when there is one.
    """

    def __init__(self, message, bracket=None):
        self.bracket = bracket
        super().__init__(message)
