"""Error types shared across the package."""

from __future__ import annotations

__all__ = [
    "WassdepError",
    "DegenerateMarginalError",
    "SinkhornConvergenceError",
    "DataError",
]


class WassdepError(Exception):
    """Base class for errors raised by this package."""


class DegenerateMarginalError(WassdepError, ValueError):
    """A marginal is empirically constant where a positive spread is required."""


class SinkhornConvergenceError(WassdepError, RuntimeError):
    """Scaling iterations hit max_iter before the marginal tolerance.

    Carries the best marginal violation achieved so callers can decide whether
    to retry with a looser tolerance or a larger budget.
    """

    def __init__(self, message: str, achieved_violation: float):
        super().__init__(message)
        self.achieved_violation = achieved_violation


class DataError(WassdepError, ValueError):
    """Input data could not be parsed or fails a structural requirement."""
