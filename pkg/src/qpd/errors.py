"""Exception hierarchy for the qpd package.

Numerical guard violations (overflow, underflow, singular matrices) are
reported through these types so that callers can distinguish a divergent
orbit or a degenerate system from a programming error.
"""


class QPDError(Exception):
    """Base class for all qpd errors."""


class DimensionMismatch(QPDError):
    """Matrix/vector dimensions do not agree."""


class WrongDimension(DimensionMismatch):
    """An operation defined only for a specific dimension received another."""


class NonFinite(QPDError):
    """A matrix or vector contains NaN or infinity."""


class NonPositiveState(QPDError):
    """A state vector has a component outside the open positive orthant."""


class BadInitialCondition(NonPositiveState):
    """A user-supplied initial condition is not strictly positive."""


class OverflowGuard(QPDError):
    """An exponent argument exceeded the guard bound; the step was rejected
    rather than silently producing inf/NaN."""


class SingularMatrix(QPDError):
    """A matrix required to be invertible is singular within tolerance."""


class SingularB(SingularMatrix):
    """The exponent matrix B is singular; no canonical LV form exists."""


class SingularSystem(SingularMatrix):
    """The LV interaction matrix is singular; the fixed-point solve failed."""


class NoInteriorFixedPoint(QPDError):
    """A fixed-point candidate failed its step-residual verification."""


class GuardTermination(QPDError):
    """An orbit hit the overflow/underflow guard before the requested horizon."""


class NoDetection(QPDError):
    """A parameter scan found no detection anywhere in the requested range."""


class SearchBudgetExceeded(QPDError):
    """An exhaustive search was refused because the problem size exceeds
    the documented budget."""


class SchemaError(QPDError):
    """A system-definition document is missing a key or has a mistyped value."""


class ParseError(QPDError):
    """A system-definition file is not valid JSON."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
