"""Exception types raised across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class FitError(ValueError):
    """The regression design is degenerate."""


class IntegrationError(RuntimeError):
    """The flow never reached the requested section."""


class StiffnessError(IntegrationError):
    """The adaptive step size collapsed below machine resolution."""


class CandidateValidationError(DomainError):
    """A dimension value that no integer codimension produces.

    ``nearest_d`` holds the closest admissible value ``2 - 2/n``.
    """

    def __init__(self, message: str, nearest_d: float):
        super().__init__(message)
        self.nearest_d = nearest_d
