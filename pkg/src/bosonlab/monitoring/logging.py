"""Structured logging for bosonlab.

Log lines go to stderr through Rich so that stdout stays free for results.
When a log directory is configured, a JSONL copy of every event is written
there as well.
"""

from __future__ import annotations

import logging
import os
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import structlog
from rich.console import Console
from structlog.contextvars import merge_contextvars

__all__ = [
    "configure_logging",
    "get_logger",
    "reset_logging",
]

_CONFIGURED = False
_CONSOLE = Console(soft_wrap=True, stderr=True)

_LEVEL_STYLES: Dict[str, str] = {
    "CRITICAL": "bold white on red",
    "ERROR": "bold red",
    "WARNING": "bold yellow",
    "INFO": "bold blue",
    "DEBUG": "dim cyan",
}

# numba and its llvmlite backend are chatty at DEBUG while compiling kernels.
_QUIET_PREFIXES = ("numba", "llvmlite")


class ThirdPartyFilter(logging.Filter):
    """Only WARNING and above from libraries; everything from bosonlab."""

    def filter(self, record: logging.LogRecord) -> bool:
        if record.name.startswith("bosonlab"):
            return True
        if record.name.startswith(_QUIET_PREFIXES):
            return record.levelno >= logging.ERROR
        return record.levelno >= logging.WARNING


class RichConsoleHandler(logging.Handler):
    def __init__(self, console: Console = _CONSOLE) -> None:
        super().__init__()
        self.console = console

    def emit(self, record: logging.LogRecord) -> None:  # pragma: no cover - thin wrapper
        try:
            self.console.print(self.format(record), markup=True, highlight=False)
        except Exception:  # pragma: no cover
            self.handleError(record)


class ElapsedProcessor:
    """Stamp each event with milliseconds since the previous one from the same logger."""

    def __init__(self) -> None:
        self._last_seen: Dict[str, float] = {}

    def __call__(self, logger: Any, name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
        now = time.monotonic()
        key = str(event_dict.get("logger", name))
        event_dict["delta_ms"] = int((now - self._last_seen.get(key, now)) * 1000)
        self._last_seen[key] = now
        return event_dict


def _format_pairs(pairs: Iterable[tuple[str, Any]]) -> str:
    formatted = []
    for key, value in pairs:
        if isinstance(value, float):
            formatted.append(f"{key}={value:.6g}")
        elif isinstance(value, str) and " " in value:
            formatted.append(f'{key}="{value}"')
        else:
            formatted.append(f"{key}={value!s}")
    return " ".join(formatted)


def _console_renderer(logger: Any, name: str, event_dict: Dict[str, Any]) -> str:
    event_dict.pop("timestamp", None)
    level = str(event_dict.pop("level", "info")).upper()
    delta_ms = event_dict.pop("delta_ms", None)
    component = str(event_dict.pop("logger", name)).removeprefix("bosonlab.")
    event = event_dict.pop("event", "")

    style = _LEVEL_STYLES.get(level, "white")
    short_level = "WARN" if level == "WARNING" else level[:4]
    stamp = datetime.now().strftime("%H:%M:%S")
    delta = "" if delta_ms is None else f" [dim cyan]+{delta_ms}ms[/]"
    prefix = f"[dim white]{stamp}[/] [{style}]{short_level:<4}[/] [bold magenta]{component}[/]{delta}"

    pairs = _format_pairs(sorted(event_dict.items()))
    if pairs:
        return f"{prefix} | {event} [dim]{pairs}[/]"
    return f"{prefix} | {event}"


def _shared_processors() -> list[Any]:
    return [
        merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", key="timestamp"),
        ElapsedProcessor(),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]


def configure_logging(
    level: Optional[str] = None,
    log_dir: Optional[Path | str] = None,
    *,
    force: bool = False,
) -> None:
    """Install console (and optional JSONL file) handlers once per process.

    ``level`` falls back to ``BOSONLAB_LOG_LEVEL`` and then WARNING. ``log_dir``
    falls back to ``BOSONLAB_LOG_DIR``; without either no file is written.
    """
    global _CONFIGURED
    if _CONFIGURED and not force:
        return

    resolved_level = (level or os.getenv("BOSONLAB_LOG_LEVEL") or "WARNING").upper()
    numeric_level = logging.getLevelName(resolved_level)
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    console_handler = RichConsoleHandler()
    console_handler.setLevel(numeric_level)
    console_handler.addFilter(ThirdPartyFilter())
    console_handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            processor=_console_renderer,
            foreign_pre_chain=_shared_processors(),
        )
    )
    handlers: list[logging.Handler] = [console_handler]

    directory = log_dir or os.getenv("BOSONLAB_LOG_DIR")
    if directory:
        path = Path(directory).expanduser().resolve()
        path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path / f"bosonlab-{datetime.now():%Y%m%d}.jsonl", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.addFilter(ThirdPartyFilter())
        file_handler.setFormatter(
            structlog.stdlib.ProcessorFormatter(
                processor=structlog.processors.JSONRenderer(),
                foreign_pre_chain=_shared_processors(),
            )
        )
        handlers.append(file_handler)

    logging.basicConfig(level=logging.DEBUG if directory else numeric_level, handlers=handlers, force=True)

    structlog.configure(
        processors=_shared_processors() + [structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )
    _CONFIGURED = True


def reset_logging() -> None:
    """Forget the installed configuration so the next call reconfigures."""
    global _CONFIGURED
    _CONFIGURED = False


def get_logger(name: Optional[str] = None, **context: Any) -> structlog.stdlib.BoundLogger:
    """Return a structlog logger bound to ``name`` and any extra context."""
    configure_logging()
    base = structlog.get_logger(name or "bosonlab")
    return base.bind(**context) if context else base
