"""Custom exceptions for bosonlab"""

from __future__ import annotations

from typing import Any, Optional, Sequence


class BosonLabError(Exception):
    """Base class for every error raised by bosonlab.

    ``exit_code`` is what the command line front end returns when the error
    escapes a command.
    """

    exit_code = 1


class ValidationError(BosonLabError):
    """Raised when an input violates a documented precondition."""

    exit_code = 1


class DimensionMismatchError(ValidationError):
    """Raised when matrix or configuration sizes do not agree."""

    def __init__(self, message: str, expected: Any = None, actual: Any = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class ScheduleViolationError(ValidationError):
    """Raised when a hopping schedule breaks the locality or magnitude constraints"""

    def __init__(self, message: str, violations: Optional[Sequence[Any]] = None):
        """Initialize ScheduleViolationError

        Args:
            message: Exception message
            violations: The offending entries as reported by validate_schedule
        """
        super().__init__(message)
        self.violations = list(violations or [])


class GuardExceededError(BosonLabError):
    """Raised before any work starts when a problem is too large to run exactly."""

    exit_code = 2

    def __init__(self, guard: str, requested: float, limit: float, context: str = ""):
        """Initialize GuardExceededError

        Args:
            guard: Name of the guard (``enumeration``, ``fock_dimension``, ...)
            requested: Size the caller asked for
            limit: Configured ceiling
            context: Optional description of where the request came from
        """
        where = f" ({context})" if context else ""
        super().__init__(f"{guard} guard exceeded{where}: {requested} > {limit}")
        self.guard = guard
        self.requested = requested
        self.limit = limit
        self.context = context


__all__ = [
    "BosonLabError",
    "ValidationError",
    "DimensionMismatchError",
    "ScheduleViolationError",
    "GuardExceededError",
]
