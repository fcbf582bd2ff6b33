"""Shared formatting utilities for the stderr run summaries."""

from __future__ import annotations

import math
from typing import Iterable, Optional

from rich import box
from rich.console import Console
from rich.table import Table

from bosonlab.core.models import CheckResult


def format_duration(seconds: Optional[float]) -> str:
    """Compact wall-time string: ``850ms``, ``12.3s``, ``4m 05s``."""
    if seconds is None:
        return "—"
    seconds = abs(seconds)
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, secs = divmod(int(seconds), 60)
    hours, minutes = divmod(minutes, 60)
    if hours:
        return f"{hours}h {minutes:02d}m"
    return f"{minutes}m {secs:02d}s"


def format_float(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "—"
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value != 0 and (abs(value) < 10 ** -digits or abs(value) >= 10**6):
        return f"{value:.{digits - 1}e}"
    return f"{value:.{digits}g}"


def shorten(text: str, limit: int = 80) -> str:
    clean = " ".join(text.strip().split())
    if len(clean) <= limit:
        return clean
    return clean[: limit - 1].rstrip() + "…"


def summary_table(title: str, rows: Iterable[tuple[str, str]]) -> Table:
    """Two-column key/value table used after every command."""
    table = Table(box=box.ROUNDED, title=title, show_header=False)
    table.add_column("Item", style="bold cyan", justify="right")
    table.add_column("Value", justify="left")
    for key, value in rows:
        table.add_row(key, value)
    return table


def check_table(results: Iterable[CheckResult], limit: int = 20) -> Table:
    """Failing checks first, then the rest, truncated to ``limit`` rows."""
    ordered = sorted(results, key=lambda r: r.passed)
    table = Table(box=box.ROUNDED, title="Checks", expand=False)
    table.add_column("Check", style="bold cyan")
    table.add_column("Params")
    table.add_column("Measured", justify="right")
    table.add_column("Envelope", justify="right")
    table.add_column("Ratio", justify="right")
    table.add_column("Pass", justify="center")
    for row in ordered[:limit]:
        params = ", ".join(f"{k}={v}" for k, v in row.params.items())
        table.add_row(
            row.check,
            shorten(params, 40),
            format_float(row.measured),
            format_float(row.envelope),
            format_float(row.ratio),
            "[green]✓[/]" if row.passed else "[red]✗[/]",
        )
    if len(ordered) > limit:
        table.caption = f"{len(ordered) - limit} more rows in the report CSV"
    return table


def print_summary(console: Console, title: str, rows: Iterable[tuple[str, str]]) -> None:
    console.print(summary_table(title, rows))


__all__ = [
    "check_table",
    "format_duration",
    "format_float",
    "print_summary",
    "shorten",
    "summary_table",
]
