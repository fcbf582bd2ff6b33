"""Configuration, exceptions and formatting helpers.

``bosonlab.utils.display`` depends on the core models and is imported
directly by its callers.
"""

from .config import Config, ConfigNode, get_config
from .exceptions import (
    BosonLabError,
    DimensionMismatchError,
    GuardExceededError,
    ScheduleViolationError,
    ValidationError,
)

__all__ = [
    "BosonLabError",
    "Config",
    "ConfigNode",
    "DimensionMismatchError",
    "GuardExceededError",
    "ScheduleViolationError",
    "ValidationError",
    "get_config",
]
