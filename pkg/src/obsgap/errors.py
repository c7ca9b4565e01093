"""Shared exception and warning types.

Numerical routines in this package distinguish three failure modes: bad
arguments (ParameterError), grids or series that cannot represent the
requested object (ResolutionError / TruncationError), and iterations that
ran out of budget before reaching tolerance (ConvergenceError).  Anything
that merely degrades accuracy without invalidating the result is reported
through AccuracyWarning instead of an exception.
"""

from __future__ import annotations


class ObsgapError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(ObsgapError, ValueError):
    """An argument is outside the documented domain."""


class ResolutionError(ObsgapError):
    """A grid is too coarse to resolve the requested oscillation or mode."""


class TruncationError(ObsgapError):
    """A truncated domain or series still carries non-negligible mass."""


class ConvergenceError(ObsgapError):
    """An iterative solve failed to reach tolerance.

    The optional ``diagnostics`` payload carries solver state (iterates,
    last increment, residuals) for post-mortem inspection.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class AccuracyWarning(UserWarning):
    """A result is returned but its accuracy may be degraded."""
