"""Experiment configuration files.

An experiment file is a flat YAML mapping of ``key: value`` lines::

    n: 2
    source: anderson
    W: 10
    times: [10, 25, 50]
    seeds: [0, 1, 2]
    separations: [4, 20]
    m: 41

Unknown keys are rejected. Relative paths are resolved against the directory
holding the file.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

import numpy as np
import yaml

from bosonlab.core.bosonic import check_enumeration_guard
from bosonlab.core.lattice import build_lattice, separation_chain
from bosonlab.core.models import BoundParams, HoppingSchedule, LatticeSpec
from bosonlab.monitoring.logging import get_logger
from bosonlab.storage.formats import matrix_from_text, schedule_from_text
from bosonlab.utils.config import Config, get_config
from bosonlab.utils.exceptions import GuardExceededError, ValidationError

logger = get_logger(__name__)

SOURCES = ("clean", "anderson", "random", "file")
BATTERIES = ("lr", "localization", "lemma_s2", "lattice_sums", "tvd_bound")
DEFAULT_TAIL_LENGTHS = (5.0, 10.0, 20.0, 40.0)
DEFAULT_SCALED_LENGTHS = (1.0, 2.0, 3.0, 4.0, 8.0)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 2
    beta: float = 2.0
    c1: float = 1.0
    d: int = 1
    source: str = "clean"
    W: float = 0.0
    schedule_file: Optional[Path] = None
    hopping_file: Optional[Path] = None
    times: tuple[float, ...] = ()
    seeds: tuple[int, ...] = (0,)
    separations: tuple[int, ...] = ()
    padding: int = 0
    m: Optional[int] = None
    v: Optional[float] = None
    xi: Optional[float] = None
    out: Optional[Path] = None
    threads: Optional[int] = None
    checks: tuple[str, ...] = BATTERIES
    tail_lengths: tuple[float, ...] = DEFAULT_TAIL_LENGTHS
    scaled_lengths: tuple[float, ...] = DEFAULT_SCALED_LENGTHS

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"n must be at least 1, got {self.n}")
        if self.d not in (1, 2, 3):
            raise ValidationError(f"d must be 1, 2 or 3, got {self.d}")
        if self.source not in SOURCES:
            raise ValidationError(f"source must be one of {', '.join(SOURCES)}, got '{self.source}'")
        if self.W < 0:
            raise ValidationError(f"W must be nonnegative, got {self.W}")
        if self.source == "file":
            if (self.schedule_file is None) == (self.hopping_file is None):
                raise ValidationError("source 'file' needs exactly one of schedule_file or hopping_file")
        elif self.schedule_file is not None or self.hopping_file is not None:
            raise ValidationError(f"schedule_file/hopping_file only apply to source 'file', not '{self.source}'")
        if self.schedule_file is not None:
            if self.times:
                raise ValidationError("times cannot be combined with schedule_file; the schedule fixes the time")
        elif not self.times:
            raise ValidationError("times must list at least one time")
        if any(t < 0 or not math.isfinite(t) for t in self.times):
            raise ValidationError(f"times must be finite and nonnegative, got {list(self.times)}")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValidationError(f"times must be strictly increasing, got {list(self.times)}")
        if not self.seeds:
            raise ValidationError("seeds must list at least one seed")
        if self.separations:
            if self.d != 1:
                raise ValidationError("separation sweeps are one-dimensional; set d: 1")
            if min(self.separations) < 1:
                raise ValidationError(f"separations must be positive, got {list(self.separations)}")
        elif self.m is not None:
            raise ValidationError("m only applies to separation sweeps")
        if self.padding < 0:
            raise ValidationError(f"padding must be nonnegative, got {self.padding}")
        if self.v is not None and self.v < 0:
            raise ValidationError(f"v must be nonnegative, got {self.v}")
        if self.xi is not None and not self.xi > 0:
            raise ValidationError(f"xi must be positive, got {self.xi}")
        if self.threads is not None and self.threads < 1:
            raise ValidationError(f"threads must be positive, got {self.threads}")
        unknown = [c for c in self.checks if c not in BATTERIES]
        if unknown:
            raise ValidationError(f"unknown check batteries: {', '.join(unknown)}")
        for name in ("tail_lengths", "scaled_lengths"):
            if any(not x >= 1 for x in getattr(self, name)):
                raise ValidationError(f"{name} entries must be at least 1 (in units of xi)")

    @property
    def seeded(self) -> bool:
        """Whether the hopping matrix depends on the seed."""
        return self.source in ("anderson", "random")

    @property
    def run_seeds(self) -> tuple[int, ...]:
        # deterministic sources would only repeat identical rows
        return self.seeds if self.seeded else self.seeds[:1]

    def bound_params(self, settings: Optional[Config] = None) -> BoundParams:
        settings = settings or get_config()
        v = self.v if self.v is not None else settings.bounds.get("v")
        xi = self.xi if self.xi is not None else float(settings.bounds.xi)
        if v is None:
            return BoundParams.default(self.d, xi)
        return BoundParams(float(v), xi)

    def lattices(self) -> list[LatticeSpec]:
        """Every geometry in the sweep, in grid order."""
        if self.separations:
            return [separation_chain(self.n, s, self.padding, self.m) for s in self.separations]
        return [build_lattice(self.n, self.beta, self.c1, self.d)]

    def with_overrides(
        self,
        seed: Optional[int] = None,
        out: Optional[str | Path] = None,
        threads: Optional[int] = None,
    ) -> "ExperimentConfig":
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seeds"] = (int(seed),)
        if out is not None:
            changes["out"] = Path(out)
        if threads is not None:
            changes["threads"] = int(threads)
        return dataclasses.replace(self, **changes) if changes else self

    def check_guards(self, settings: Optional[Config] = None) -> list[LatticeSpec]:
        """Build every lattice and check the size guards before any work starts.

        Raises GuardExceededError naming the first grid point that is too big.
        """
        settings = settings or get_config()
        limit = settings.guard("enumeration_limit")
        max_particles = settings.guard("max_particles")
        if self.n > max_particles:
            raise GuardExceededError("max_particles", self.n, max_particles, f"n={self.n}")
        specs = self.lattices()
        for index, spec in enumerate(specs):
            context = f"grid point {index}: n={spec.n}, m={spec.m}, L={spec.L:g}"
            if self.separations:
                context += f", separation={self.separations[index]}"
            check_enumeration_guard(spec.m, spec.n, limit, context)
        logger.debug("experiment.guards_ok", lattices=len(specs), limit=limit)
        return specs

    def describe(self) -> dict[str, Any]:
        return {
            f.name: getattr(self, f.name)
            for f in dataclasses.fields(self)
            if getattr(self, f.name) != f.default
        }


# parsing -------------------------------------------------------------------


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ValidationError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{key} must be a number, got {value!r}")
    return float(value)


def _as_str(key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ValidationError(f"{key} must be a string, got {value!r}")
    return value


def _as_list(convert: Callable[[str, Any], Any]) -> Callable[[str, Any], tuple[Any, ...]]:
    def parse(key: str, value: Any) -> tuple[Any, ...]:
        items = value if isinstance(value, list) else [value]
        return tuple(convert(key, item) for item in items)

    return parse


def _optional(convert: Callable[[str, Any], Any]) -> Callable[[str, Any], Any]:
    def parse(key: str, value: Any) -> Any:
        return None if value is None else convert(key, value)

    return parse


_PARSERS: Mapping[str, Callable[[str, Any], Any]] = {
    "n": _as_int,
    "beta": _as_float,
    "c1": _as_float,
    "d": _as_int,
    "source": _as_str,
    "W": _as_float,
    "schedule_file": _optional(_as_str),
    "hopping_file": _optional(_as_str),
    "times": _as_list(_as_float),
    "seeds": _as_list(_as_int),
    "separations": _as_list(_as_int),
    "padding": _as_int,
    "m": _optional(_as_int),
    "v": _optional(_as_float),
    "xi": _optional(_as_float),
    "out": _optional(_as_str),
    "threads": _optional(_as_int),
    "checks": _as_list(_as_str),
    "tail_lengths": _as_list(_as_float),
    "scaled_lengths": _as_list(_as_float),
}

_PATH_KEYS = ("schedule_file", "hopping_file", "out")


def parse_experiment_config(data: Any, base_dir: Optional[Path] = None) -> ExperimentConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError("experiment config must be a mapping of key: value lines")
    unknown = sorted(str(k) for k in data if k not in _PARSERS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    values: dict[str, Any] = {key: _PARSERS[key](key, raw) for key, raw in data.items()}
    for key in _PATH_KEYS:
        if values.get(key) is not None:
            path = Path(values[key]).expanduser()
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            values[key] = path
    return ExperimentConfig(**values)


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    path = Path(path).expanduser()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config file {path} is not valid YAML: {exc}") from exc
    config = parse_experiment_config(data, base_dir=path.parent)
    logger.info("experiment.config_loaded", path=str(path), **{k: str(v) for k, v in config.describe().items()})
    return config


def read_input(path: Path, what: str) -> str:
    try:
        return Path(path).expanduser().read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {what} file {path}: {exc.strerror}") from exc


def load_schedule_file(path: Path) -> HoppingSchedule:
    return schedule_from_text(read_input(path, "schedule"))


def load_matrix_file(path: Path) -> np.ndarray:
    return matrix_from_text(read_input(path, "matrix"))


__all__ = [
    "BATTERIES",
    "SOURCES",
    "ExperimentConfig",
    "load_experiment_config",
    "load_matrix_file",
    "load_schedule_file",
    "parse_experiment_config",
    "read_input",
]
