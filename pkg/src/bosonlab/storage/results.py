"""Output files for command runs."""

from __future__ import annotations

import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from bosonlab.monitoring.logging import get_logger

logger = get_logger(__name__)


class ResultWriter:
    """Write command outputs either to stdout or atomically into files.

    With a ``target`` every file is first written to a temporary sibling and
    then renamed into place, so a failed run never leaves a partial CSV.
    """

    def __init__(self, target: Optional[str | Path] = None):
        self.target = Path(target).expanduser() if target else None
        self.written: list[Path] = []

    def path_for(self, suffix: str = "") -> Optional[Path]:
        """Path of an auxiliary output, ``<target stem><suffix>`` next to the target."""
        if self.target is None:
            return None
        if not suffix:
            return self.target
        return self.target.with_name(self.target.stem + suffix)

    def write(self, text: str, suffix: str = "") -> Optional[Path]:
        path = self.path_for(suffix)
        if path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except Exception:
            Path(tmp_name).unlink(missing_ok=True)
            logger.error("results.write_failed", path=str(path))
            raise
        self.written.append(path)
        logger.info("results.written", path=str(path), bytes=len(text.encode("utf-8")))
        return path


__all__ = ["ResultWriter"]
