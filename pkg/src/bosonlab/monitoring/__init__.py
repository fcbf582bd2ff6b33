"""Observability - structured logging and run metrics."""

from .logging import configure_logging, get_logger
from .metrics import RunRecorder, StageMetric

__all__ = ["RunRecorder", "StageMetric", "configure_logging", "get_logger"]
