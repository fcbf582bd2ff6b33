"""Exact boson-sampling output distributions, exact sampling and a Fock-space oracle."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from scipy import linalg

from bosonlab.core.models import (
    Configuration,
    HoppingSchedule,
    Occupation,
    OutcomeDistribution,
    Propagator,
)
from bosonlab.core.permanent import permanent, submatrix_for_transition
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import (
    DimensionMismatchError,
    GuardExceededError,
    ValidationError,
)

logger = get_logger(__name__)

ENUMERATION_LIMIT = 1_000_000
FOCK_DIMENSION_LIMIT = 5000
MAX_PARTICLES = 10


def configuration_count(m: int, n: int) -> int:
    """C(m+n-1, n): number of ways to put n bosons on m modes."""
    if m == 0:
        return 1 if n == 0 else 0
    return math.comb(m + n - 1, n)


def _lex(m: int, n: int) -> Iterator[Occupation]:
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _lex(m - 1, n - first):
            yield (first,) + rest


def enumerate_configurations(m: int, n: int) -> list[Occupation]:
    """All occupation tuples in ascending lexicographic order, (0,…,0,n) first."""
    if m < 0 or n < 0:
        raise ValidationError(f"need m, n >= 0, got m={m}, n={n}")
    if m == 0:
        return [()] if n == 0 else []
    return list(_lex(m, n))


def check_enumeration_guard(m: int, n: int, limit: int = ENUMERATION_LIMIT, context: str = "") -> int:
    count = configuration_count(m, n)
    if count > limit:
        raise GuardExceededError("enumeration", count, limit, context)
    return count


def _check_particles(n: int, limit: int) -> None:
    if n > limit:
        raise GuardExceededError("max_particles", n, limit)


def transition_probability(
    R: Propagator,
    r: Configuration,
    s: Configuration,
    max_particles: int = MAX_PARTICLES,
) -> float:
    """|Per(A)|² / (r!·s!)."""
    if r.n != s.n:
        raise ValidationError(f"particle number mismatch: input has {r.n}, output has {s.n}")
    _check_particles(r.n, max_particles)
    A = submatrix_for_transition(R, r, s).A
    amplitude = permanent(A)
    return float(abs(amplitude) ** 2 / (r.factorial * s.factorial))


def exact_distribution(
    R: Propagator,
    r: Configuration,
    threads: int = 1,
    enumeration_limit: int = ENUMERATION_LIMIT,
    max_particles: int = MAX_PARTICLES,
) -> OutcomeDistribution:
    """The full output distribution D_U, one permanent per outcome.

    Outcomes are evaluated in parallel when ``threads`` > 1; the permanent
    kernel releases the GIL. The table is always in lexicographic order.
    """
    if r.m != R.m:
        raise DimensionMismatchError("input configuration does not match propagator", R.m, r.m)
    _check_particles(r.n, max_particles)
    check_enumeration_guard(R.m, r.n, enumeration_limit)
    outcomes = enumerate_configurations(R.m, r.n)

    def evaluate(occ: Occupation) -> float:
        return transition_probability(R, r, Configuration(occ), max_particles)

    if threads > 1 and len(outcomes) > 64:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            probs = list(pool.map(evaluate, outcomes, chunksize=256))
    else:
        probs = [evaluate(occ) for occ in outcomes]

    dist = OutcomeDistribution(r.n, R.m, dict(zip(outcomes, probs)))
    logger.debug("bosonic.exact_distribution", m=R.m, n=r.n, outcomes=len(outcomes), total=dist.total())
    return dist


def _inverse_cdf(probs: np.ndarray, rng: np.random.Generator, count: int) -> np.ndarray:
    cdf = np.cumsum(probs)
    draws = rng.random(count) * cdf[-1]
    idx = np.searchsorted(cdf, draws, side="right")
    return np.minimum(idx, len(probs) - 1)


def sample_exact(dist: OutcomeDistribution, seed: int, count: int) -> list[Configuration]:
    """Inverse-CDF draws over the distribution's fixed outcome order."""
    if len(dist) == 0:
        raise ValidationError("cannot sample from an empty distribution")
    if count < 0:
        raise ValidationError(f"sample count must be nonnegative, got {count}")
    outcomes = list(dist.entries)
    probs = np.fromiter(dist.entries.values(), dtype=float, count=len(outcomes))
    if probs.sum() <= 0:
        raise ValidationError("distribution has no probability mass")
    rng = np.random.default_rng(seed)
    return [Configuration(outcomes[i]) for i in _inverse_cdf(probs, rng, count)]


def fock_basis(m: int, n: int, limit: int = FOCK_DIMENSION_LIMIT) -> tuple[list[Occupation], dict[Occupation, int]]:
    dim = configuration_count(m, n)
    if dim > limit:
        raise GuardExceededError("fock_dimension", dim, limit)
    basis = enumerate_configurations(m, n)
    return basis, {occ: idx for idx, occ in enumerate(basis)}


def fock_hamiltonian(J: np.ndarray, basis: Sequence[Occupation], index: dict[Occupation, int]) -> np.ndarray:
    """Matrix of Σ J_ij a_i† a_j in the n-boson occupation basis."""
    m = J.shape[0]
    H = np.zeros((len(basis), len(basis)), dtype=np.complex128)
    hops = [(i, j, J[i, j]) for i in range(m) for j in range(m) if i != j and J[i, j] != 0]
    onsite = np.real(np.diag(J))
    for col, occ in enumerate(basis):
        H[col, col] += float(np.dot(onsite, occ))
        for i, j, amp in hops:
            if occ[j] == 0:
                continue
            target = list(occ)
            target[j] -= 1
            target[i] += 1
            H[index[tuple(target)], col] += amp * math.sqrt(occ[j] * (occ[i] + 1))
    return H


def fock_oracle_distribution(
    sched: HoppingSchedule,
    r: Configuration,
    limit: int = FOCK_DIMENSION_LIMIT,
) -> OutcomeDistribution:
    """Evolve |r⟩ under the second-quantised Hamiltonian of each segment.

    Works in the full occupation basis and never evaluates a permanent.
    """
    if r.m != sched.m:
        raise DimensionMismatchError("input configuration does not match schedule", sched.m, r.m)
    basis, index = fock_basis(sched.m, r.n, limit)
    psi = np.zeros(len(basis), dtype=np.complex128)
    psi[index[r.occ]] = 1.0
    for seg in sched:
        energies, vectors = linalg.eigh(fock_hamiltonian(seg.J, basis, index))
        psi = vectors @ (np.exp(-1j * energies * seg.duration) * (vectors.conj().T @ psi))
    probs = np.abs(psi) ** 2
    return OutcomeDistribution(r.n, sched.m, {occ: float(p) for occ, p in zip(basis, probs)})


def marginal_occupations(dist: OutcomeDistribution) -> np.ndarray:
    """Mean number of bosons on each site."""
    mean = np.zeros(dist.m)
    for occ, p in dist.items():
        mean += p * np.asarray(occ, dtype=float)
    return mean


def empirical_distribution(samples: Iterable[Configuration | Occupation], m: int, n: int) -> OutcomeDistribution:
    """Frequency table of a sample stream, outcomes in lexicographic order."""
    counts = Counter(s.occ if isinstance(s, Configuration) else tuple(s) for s in samples)
    total = sum(counts.values())
    if total == 0:
        raise ValidationError("no samples to tabulate")
    return OutcomeDistribution(n, m, {occ: counts[occ] / total for occ in sorted(counts)})


__all__ = [
    "ENUMERATION_LIMIT",
    "FOCK_DIMENSION_LIMIT",
    "MAX_PARTICLES",
    "check_enumeration_guard",
    "configuration_count",
    "empirical_distribution",
    "enumerate_configurations",
    "exact_distribution",
    "fock_basis",
    "fock_hamiltonian",
    "fock_oracle_distribution",
    "marginal_occupations",
    "sample_exact",
    "transition_probability",
]
