"""Data model shared by every bosonlab module.

Matrices are numpy arrays held inside frozen dataclasses. Array-bearing
types use ``eq=False`` so identity comparison is used; compare their
matrices with ``numpy.testing`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Iterator, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from bosonlab.utils.exceptions import DimensionMismatchError, ValidationError

Occupation = tuple[int, ...]
Coordinate = tuple[int, ...]

PROPAGATOR_CONVENTION = "a(t) = R·a(0)"


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of a d-dimensional lattice with n bosons on regular positions.

    ``coords`` lists the m ordinary sites sorted row-major; a site's index is
    its position in that tuple. ``occupied`` holds the indices of the sites
    that start with one boson. Ancilla cells are kept apart from the ordinary
    sites and never get an index.
    """

    d: int
    n: int
    beta: float
    c1: float
    m: int
    side: int
    coords: tuple[Coordinate, ...]
    ancilla_coords: tuple[Coordinate, ...]
    occupied: tuple[int, ...]
    L: float

    def __post_init__(self) -> None:
        if len(self.coords) != self.m:
            raise DimensionMismatchError("coordinate count differs from m", self.m, len(self.coords))
        if len(self.occupied) != self.n:
            raise DimensionMismatchError("occupied site count differs from n", self.n, len(self.occupied))

    @cached_property
    def index_of(self) -> dict[Coordinate, int]:
        return {coord: idx for idx, coord in enumerate(self.coords)}

    @cached_property
    def positions(self) -> np.ndarray:
        """Coordinates as an (m, d) integer array."""
        return np.asarray(self.coords, dtype=np.int64).reshape(self.m, self.d)

    @cached_property
    def distances(self) -> np.ndarray:
        """Euclidean distance matrix between ordinary sites."""
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt((diff.astype(float) ** 2).sum(axis=-1))

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean (m, m) matrix of unit-Manhattan-distance neighbours."""
        diff = np.abs(self.positions[:, None, :] - self.positions[None, :, :])
        return diff.sum(axis=-1) == 1


@dataclass(frozen=True)
class Configuration:
    """Occupation vector: ``occ[j]`` bosons on site j."""

    occ: Occupation

    def __post_init__(self) -> None:
        occ = tuple(int(x) for x in self.occ)
        if any(x < 0 for x in occ):
            raise ValidationError(f"occupations must be nonnegative, got {occ}")
        object.__setattr__(self, "occ", occ)

    @classmethod
    def from_sites(cls, m: int, sites: Sequence[int]) -> "Configuration":
        occ = [0] * m
        for site in sites:
            if not 0 <= site < m:
                raise ValidationError(f"site {site} outside 0..{m - 1}")
            occ[site] += 1
        return cls(tuple(occ))

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        """Inverse of ``str``: ``"1-0-1"`` → (1, 0, 1)."""
        try:
            return cls(tuple(int(x) for x in text.strip().split("-")))
        except ValueError as exc:
            raise ValidationError(f"bad occupation '{text}'") from exc

    @property
    def m(self) -> int:
        return len(self.occ)

    @property
    def n(self) -> int:
        return sum(self.occ)

    @property
    def sites(self) -> tuple[int, ...]:
        """Nondecreasing site list in which site j appears occ[j] times."""
        return tuple(j for j, count in enumerate(self.occ) for _ in range(count))

    @property
    def factorial(self) -> int:
        """Exact product of occ[j]! over sites."""
        return math.prod(math.factorial(x) for x in self.occ)

    def __str__(self) -> str:
        return "-".join(str(x) for x in self.occ)


@dataclass(frozen=True, eq=False)
class Segment:
    """One piece of a piecewise-constant Hamiltonian: J applied for ``duration``."""

    duration: float
    J: np.ndarray

    def __post_init__(self) -> None:
        J = np.array(self.J, dtype=np.complex128)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise DimensionMismatchError("hopping matrix must be square", "square", J.shape)
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValidationError(f"segment duration must be positive, got {self.duration}")
        J.setflags(write=False)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "duration", float(self.duration))

    @property
    def m(self) -> int:
        return self.J.shape[0]


@dataclass(frozen=True, eq=False)
class HoppingSchedule:
    """Ordered segments; the first one acts first."""

    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise ValidationError("schedule needs at least one segment")
        sizes = {seg.m for seg in segments}
        if len(sizes) != 1:
            raise DimensionMismatchError("segments act on different mode counts", None, sorted(sizes))
        object.__setattr__(self, "segments", segments)

    @classmethod
    def constant(cls, J: np.ndarray, t: float) -> "HoppingSchedule":
        return cls((Segment(t, J),))

    @property
    def m(self) -> int:
        return self.segments[0].m

    @property
    def total_time(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True, eq=False)
class Propagator:
    """Single-particle propagator with a(t) = R·a(0).

    A boson created on site k ends on site l with amplitude ``R[l, k]``;
    :attr:`transfer` exposes that as ``transfer[k, l]``.
    """

    R: np.ndarray
    t: float = 0.0
    convention: str = PROPAGATOR_CONVENTION

    def __post_init__(self) -> None:
        R = np.array(self.R, dtype=np.complex128)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise DimensionMismatchError("propagator must be square", "square", R.shape)
        R.setflags(write=False)
        object.__setattr__(self, "R", R)

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def transfer(self) -> np.ndarray:
        return self.R.T

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.R.conj().T @ self.R - np.eye(self.m))))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """n×n matrix whose permanent gives the r → s amplitude.

    Row a carries input boson a and column b carries output slot b, so
    ``A[a, b] = R[out_b, in_a]``.
    """

    A: np.ndarray
    r: Configuration
    s: Configuration


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over n-boson configurations on m modes.

    ``entries`` preserves insertion order; enumerators insert in the
    canonical lexicographic order.
    """

    n: int
    m: int
    entries: Mapping[Occupation, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for occ in self.entries:
            if len(occ) != self.m or sum(occ) != self.n:
                raise ValidationError(f"outcome {occ} is not an {self.n}-boson configuration on {self.m} modes")
        object.__setattr__(self, "entries", dict(self.entries))

    def probability(self, occ: Occupation | Configuration) -> float:
        key = occ.occ if isinstance(occ, Configuration) else tuple(occ)
        return self.entries.get(key, 0.0)

    def total(self) -> float:
        return float(math.fsum(self.entries.values()))

    def support(self, floor: float = 0.0) -> list[Occupation]:
        return [occ for occ, p in self.entries.items() if p > floor]

    def items(self):
        return self.entries.items()

    def __len__(self) -> int:
        return len(self.entries)

    def check_normalized(self, tol: float = 1e-9) -> None:
        total = self.total()
        if abs(total - 1.0) > tol:
            raise ValidationError(f"distribution sums to {total!r}, expected 1 within {tol}")


@dataclass(frozen=True, eq=False)
class MarkovMatrix:
    """Doubly stochastic single-step transition matrix, P[k, l] = Pr(k → l)."""

    P: np.ndarray

    def __post_init__(self) -> None:
        P = np.array(self.P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionMismatchError("transition matrix must be square", "square", P.shape)
        if np.any(P < 0):
            raise ValidationError("transition matrix has negative entries")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def m(self) -> int:
        return self.P.shape[0]

    def stochastic_error(self) -> float:
        rows = np.abs(self.P.sum(axis=1) - 1.0).max(initial=0.0)
        cols = np.abs(self.P.sum(axis=0) - 1.0).max(initial=0.0)
        return float(max(rows, cols))


class ViolationKind(str, Enum):
    HERMITIAN = "hermitian"
    ADJACENCY = "adjacency"
    MAGNITUDE = "magnitude"


class ScheduleViolation(NamedTuple):
    segment: int
    i: int
    j: int
    kind: ViolationKind
    value: complex


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[ScheduleViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def of_kind(self, kind: ViolationKind) -> list[ScheduleViolation]:
        return [v for v in self.violations if v.kind is kind]

    def __len__(self) -> int:
        return len(self.violations)


@dataclass(frozen=True)
class BoundParams:
    """Light-cone parameters: velocity ``v`` (sites per unit time) and decay length ``xi``."""

    v: float
    xi: float = 1.0

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValidationError(f"velocity must be nonnegative, got {self.v}")
        if not self.xi > 0:
            raise ValidationError(f"decay length must be positive, got {self.xi}")

    @staticmethod
    def default_velocity(d: int) -> float:
        """4(1 + 2de), the velocity guaranteed for nearest-neighbour |J| ≤ 1."""
        return 4.0 * (1.0 + 2.0 * d * math.e)

    @classmethod
    def default(cls, d: int, xi: float = 1.0) -> "BoundParams":
        return cls(cls.default_velocity(d), xi)

    @classmethod
    def localized(cls, xi: float = 1.0) -> "BoundParams":
        return cls(0.0, xi)


class EnvelopeViolation(NamedTuple):
    i: int
    j: int
    magnitude: float
    envelope: float


@dataclass(frozen=True)
class EnvelopeReport:
    violations: tuple[EnvelopeViolation, ...]
    max_excess: float
    fitted_xi: float
    critical_xi: Optional[float] = None
    pairs_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


class CheckResult(NamedTuple):
    """One row of the bounds report."""

    check: str
    params: Mapping[str, Any]
    measured: float
    envelope: float
    ratio: float
    passed: bool


class Timescales(NamedTuple):
    t_easy: float
    t_hard_scale: float
    L: float
    v: float
    c_low: float
    c_high: float


class LatticeSum(NamedTuple):
    total: float
    ratio: float
    radius: float
    remainder_bound: float


class GateKind(str, Enum):
    BEAMSPLITTER = "bs"
    PHASE = "phase"


@dataclass(frozen=True)
class Gate:
    """Two-mode gate T(θ, φ) on (i, i+1), or a phase gate e^{iφ} on site i (j == i)."""

    kind: GateKind
    i: int
    j: int
    theta: float = 0.0
    phi: float = 0.0

    @property
    def modes(self) -> tuple[int, ...]:
        return (self.i,) if self.kind is GateKind.PHASE else (self.i, self.j)


@dataclass(frozen=True)
class CompiledCircuit:
    """Layers of nearest-neighbour two-mode gates followed by one phase per mode.

    Applying the circuit means applying ``layers`` in order and then
    ``diag(exp(1j * phases))``.
    """

    m: int
    layers: tuple[tuple[Gate, ...], ...]
    phases: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.phases) != self.m:
            raise DimensionMismatchError("need one output phase per mode", self.m, len(self.phases))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> list[Gate]:
        return [gate for layer in self.layers for gate in layer]

    @property
    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def phase_gates(self) -> tuple[Gate, ...]:
        return tuple(Gate(GateKind.PHASE, k, k, 0.0, phi) for k, phi in enumerate(self.phases))


class DepthReport(NamedTuple):
    m: int
    layers: int
    two_mode_gates: int
    sequential_depth: int
    hopping_time: float
    total_time: float
    t_hard_scale: float


__all__ = [
    "BoundParams",
    "CheckResult",
    "CompiledCircuit",
    "Configuration",
    "Coordinate",
    "DepthReport",
    "EnvelopeReport",
    "EnvelopeViolation",
    "Gate",
    "GateKind",
    "HoppingSchedule",
    "LatticeSpec",
    "LatticeSum",
    "MarkovMatrix",
    "Occupation",
    "OutcomeDistribution",
    "PROPAGATOR_CONVENTION",
    "Propagator",
    "ScheduleViolation",
    "Segment",
    "Timescales",
    "TransitionMatrix",
    "ValidationReport",
    "ViolationKind",
]
