"""Exception types raised across the package."""


class MapwalkError(Exception):
    """Base class for all package errors."""


class DomainError(MapwalkError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ExactDivisionError(MapwalkError, ArithmeticError):
    """A recurrence step produced a non-integral quotient.

    Carries the offending ``(n, g)`` so corrupted seeds can be traced.
    """

    def __init__(self, message, n=None, g=None):
        super().__init__(message)
        self.n = n
        self.g = g


class ConvergenceError(MapwalkError, RuntimeError):
    """An iterative numerical procedure failed to converge."""


class ClosureViolation(MapwalkError, RuntimeError):
    """A walk left the union of inner points and both boundaries."""


class SandwichViolation(MapwalkError, AssertionError):
    """The conserved-quantity bounds failed beyond their confidence band."""


class NotValidatedError(MapwalkError, RuntimeError):
    """A triangulation table was built from seeds that have not been validated."""
