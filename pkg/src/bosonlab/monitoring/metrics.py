"""Per-run timing and memory metrics."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Optional

import psutil

from bosonlab.monitoring.logging import get_logger

logger = get_logger(__name__)


@dataclass
class StageMetric:
    name: str
    seconds: float
    rss_mb: float
    items: int = 0


@dataclass
class RunRecorder:
    """Collect stage timings for one command invocation.

    When ``out_dir`` is set, :meth:`flush` appends one JSON line per run to
    ``metrics.jsonl`` there.
    """

    command: str
    out_dir: Optional[Path] = None
    stages: list[StageMetric] = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    @staticmethod
    def _rss_mb() -> float:
        return psutil.Process().memory_info().rss / (1024 * 1024)

    @contextmanager
    def stage(self, name: str, items: int = 0) -> Iterator[None]:
        begin = time.perf_counter()
        try:
            yield
        finally:
            metric = StageMetric(name, time.perf_counter() - begin, self._rss_mb(), items)
            self.stages.append(metric)
            logger.debug("stage.done", stage=name, seconds=metric.seconds, rss_mb=metric.rss_mb, items=items)

    def summary(self) -> dict[str, Any]:
        return {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "command": self.command,
            "total_seconds": time.perf_counter() - self.started,
            "peak_rss_mb": max((s.rss_mb for s in self.stages), default=self._rss_mb()),
            "stages": [asdict(s) for s in self.stages],
        }

    def flush(self) -> dict[str, Any]:
        record = self.summary()
        if self.out_dir is None:
            return record
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            with open(self.out_dir / "metrics.jsonl", "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record) + "\n")
        except OSError as exc:
            logger.error("metrics.write_failed", error=str(exc))
        return record


__all__ = ["RunRecorder", "StageMetric"]
