"""Piecewise-constant hopping Hamiltonians and the single-particle propagator."""

from __future__ import annotations

import math
from typing import Iterable, Optional

import numpy as np
from scipy import linalg

from bosonlab.core.lattice import adjacency_pairs
from bosonlab.core.models import (
    HoppingSchedule,
    LatticeSpec,
    Propagator,
    ScheduleViolation,
    Segment,
    ValidationReport,
    ViolationKind,
)
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import DimensionMismatchError, ValidationError

logger = get_logger(__name__)

HERMITIAN_TOL = 1e-12
BEAMSPLITTER_TIME = math.pi / 4


def validate_schedule(
    sched: HoppingSchedule,
    spec: LatticeSpec,
    tol: float = HERMITIAN_TOL,
) -> ValidationReport:
    """List every Hermiticity, locality and |J_ij| ≤ 1 violation.

    Off-diagonal checks look at the upper triangle only, so a Hermitian
    pair is reported once as (i, j) with i < j.
    """
    if sched.m != spec.m:
        raise DimensionMismatchError("schedule and lattice disagree on m", spec.m, sched.m)

    adjacent = spec.adjacency
    upper = np.triu(np.ones((spec.m, spec.m), dtype=bool), k=1)
    found: list[ScheduleViolation] = []
    for s_idx, seg in enumerate(sched):
        J = seg.J
        skew = np.abs(J - J.conj().T)
        for i, j in zip(*np.nonzero(np.triu(skew > tol))):
            found.append(ScheduleViolation(s_idx, int(i), int(j), ViolationKind.HERMITIAN, complex(J[i, j])))
        magnitude = np.abs(J)
        for i, j in zip(*np.nonzero(upper & ~adjacent & (magnitude > tol))):
            found.append(ScheduleViolation(s_idx, int(i), int(j), ViolationKind.ADJACENCY, complex(J[i, j])))
        for i, j in zip(*np.nonzero(upper & (magnitude > 1.0 + tol))):
            found.append(ScheduleViolation(s_idx, int(i), int(j), ViolationKind.MAGNITUDE, complex(J[i, j])))
    return ValidationReport(tuple(found))


def segment_unitary(segment: Segment, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(-i·J·τ) through the Hermitian eigendecomposition of J."""
    J = segment.J
    if np.max(np.abs(J - J.conj().T), initial=0.0) > tol:
        raise ValidationError("hopping matrix is not Hermitian")
    try:
        energies, vectors = linalg.eigh(J)
    except linalg.LinAlgError as exc:
        raise ValidationError(f"eigendecomposition failed: {exc}") from exc
    phases = np.exp(-1j * energies * segment.duration)
    return (vectors * phases) @ vectors.conj().T


def evolve(sched: HoppingSchedule, tol: float = HERMITIAN_TOL) -> Propagator:
    """R = U_k ··· U_1, later segments multiplying on the left."""
    R = np.eye(sched.m, dtype=np.complex128)
    for seg in sched:
        R = segment_unitary(seg, tol) @ R
    prop = Propagator(R, sched.total_time)
    logger.debug("evolve.done", m=sched.m, segments=len(sched), t=prop.t, unitarity=prop.unitarity_error())
    return prop


def _require_adjacent(i: int, j: int, m: int, spec: Optional[LatticeSpec]) -> None:
    for idx in (i, j):
        if not 0 <= idx < m:
            raise ValidationError(f"site {idx} outside 0..{m - 1}")
    adjacent = bool(spec.adjacency[i, j]) if spec is not None else abs(i - j) == 1
    if not adjacent:
        raise ValidationError(f"sites {i} and {j} are not lattice neighbours")


def beamsplitter_schedule(i: int, j: int, m: int, spec: Optional[LatticeSpec] = None) -> HoppingSchedule:
    """Balanced beamsplitter on (i, j): J[i, j] = -i, J[j, i] = i for time π/4.

    Without ``spec`` the sites are taken to lie on a chain.
    """
    _require_adjacent(i, j, m, spec)
    J = np.zeros((m, m), dtype=np.complex128)
    J[i, j] = -1j
    J[j, i] = 1j
    return HoppingSchedule.constant(J, BEAMSPLITTER_TIME)


def phase_schedule(k: int, phi: float, m: int) -> HoppingSchedule:
    if not math.isfinite(phi):
        raise ValidationError(f"phase must be finite, got {phi}")
    if not 0 <= k < m:
        raise ValidationError(f"site {k} outside 0..{m - 1}")
    J = np.zeros((m, m), dtype=np.complex128)
    J[k, k] = phi
    return HoppingSchedule.constant(J, 1.0)


def anderson_hopping(spec: LatticeSpec, W: float, seed: int) -> np.ndarray:
    """Unit hops on every bond plus on-site energies uniform in [-W, W]."""
    if W < 0:
        raise ValidationError(f"disorder strength must be nonnegative, got {W}")
    rng = np.random.default_rng(seed)
    J = np.zeros((spec.m, spec.m), dtype=np.complex128)
    for i, j in adjacency_pairs(spec):
        J[i, j] = J[j, i] = 1.0
    J[np.diag_indices(spec.m)] = rng.uniform(-W, W, size=spec.m)
    return J


def clean_hopping(spec: LatticeSpec) -> np.ndarray:
    return anderson_hopping(spec, 0.0, 0)


def random_hopping(spec: LatticeSpec, seed: int) -> np.ndarray:
    """Random bond amplitudes: magnitude uniform in [0, 1], phase uniform in [0, 2π)."""
    rng = np.random.default_rng(seed)
    pairs = adjacency_pairs(spec)
    magnitudes = rng.uniform(0.0, 1.0, size=len(pairs))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=len(pairs))
    J = np.zeros((spec.m, spec.m), dtype=np.complex128)
    for (i, j), r, a in zip(pairs, magnitudes, angles):
        J[i, j] = r * np.exp(1j * a)
        J[j, i] = np.conj(J[i, j])
    return J


def concat(*schedules: HoppingSchedule) -> HoppingSchedule:
    """Run the schedules one after another, first argument first."""
    segments: list[Segment] = []
    for sched in schedules:
        segments.extend(sched.segments)
    return HoppingSchedule(tuple(segments))


def generator_of(U: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Hermitian H with exp(-i·H) = U, from the complex Schur form of U.

    The result is generally long-range, so it fails validate_schedule on
    any lattice with missing bonds.
    """
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionMismatchError("unitary must be square", "square", U.shape)
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])), initial=0.0) > tol:
        raise ValidationError("matrix is not unitary")
    T, Z = linalg.schur(U, output="complex")
    H = (Z * -np.angle(np.diag(T))) @ Z.conj().T
    return (H + H.conj().T) / 2


def random_unitary(m: int, seed: int) -> np.ndarray:
    """Haar-random unitary from the QR factorisation of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    Q, R = linalg.qr(Z)
    diag = np.diag(R)
    return Q * (diag / np.abs(diag))


def quench(J: np.ndarray, times: Iterable[float]) -> list[Propagator]:
    """Propagators of a constant Hamiltonian at each time, from one diagonalisation."""
    J = np.asarray(J, dtype=np.complex128)
    if np.max(np.abs(J - J.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValidationError("hopping matrix is not Hermitian")
    energies, vectors = linalg.eigh(J)
    props = []
    for t in times:
        if t < 0:
            raise ValidationError(f"time must be nonnegative, got {t}")
        props.append(Propagator((vectors * np.exp(-1j * energies * t)) @ vectors.conj().T, float(t)))
    return props


__all__ = [
    "BEAMSPLITTER_TIME",
    "anderson_hopping",
    "beamsplitter_schedule",
    "clean_hopping",
    "concat",
    "evolve",
    "generator_of",
    "phase_schedule",
    "quench",
    "random_hopping",
    "random_unitary",
    "segment_unitary",
    "validate_schedule",
]
