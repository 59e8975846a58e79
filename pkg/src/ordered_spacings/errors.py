"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """A structurally invalid argument (sample count, order index, abscissa)."""


class PrecisionError(ArithmeticError):
    """Float evaluation lost too many digits and no exact fallback was allowed."""

    def __init__(self, message: str, x: float | None = None, digits: float | None = None):
        super().__init__(message)
        self.x = x
        self.digits = digits


class DegenerateDistributionError(ValueError):
    """Raised when a density is requested for a statistic that is a point mass.

    The ``point_mass`` attribute carries the degenerate law so callers can
    fall back to its CDF or quantile.
    """

    def __init__(self, message: str, point_mass):
        super().__init__(message)
        self.point_mass = point_mass
