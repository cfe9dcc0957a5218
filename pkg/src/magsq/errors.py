"""Exception types shared across the package."""

from __future__ import annotations


class MagsqError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MagsqError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(MagsqError, ValueError):
    """Array arguments have incompatible or unexpected shapes."""


class StateError(MagsqError, ValueError):
    """A covariance matrix or Gaussian state violates its invariants."""


class DegeneracyError(StateError):
    """A marginal covariance matrix is singular."""


class StabilityError(MagsqError):
    """The drift matrix is not Hurwitz; carries the offending margin."""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


class IntegrationError(MagsqError):
    """Time integration failed; carries the time reached before failure."""

    def __init__(self, message: str, time_reached: float):
        super().__init__(message)
        self.time_reached = time_reached


class ConfigurationError(MagsqError, ValueError):
    """Mutually inconsistent or incomplete configuration input."""


class SearchError(MagsqError):
    """An optimum search found no admissible point."""
