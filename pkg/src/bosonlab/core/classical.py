"""Distinguishable-particle sampler and its exact output distribution."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from bosonlab.core.bosonic import (
    ENUMERATION_LIMIT,
    MAX_PARTICLES,
    check_enumeration_guard,
    enumerate_configurations,
)
from bosonlab.core.models import Configuration, MarkovMatrix, Occupation, OutcomeDistribution, Propagator
from bosonlab.core.permanent import permanent
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import DimensionMismatchError, GuardExceededError, ValidationError

logger = get_logger(__name__)

UNITARITY_TOL = 1e-8
TUPLE_ORACLE_LIMIT = 1_000_000


def markov_matrix(R: Propagator, tol: float = UNITARITY_TOL) -> MarkovMatrix:
    """P[k, l] = |R[l, k]|², the probability that a walker at k moves to l.

    Rejects R when any row or column of |R|² is off 1 by more than ``tol``.
    """
    P = np.abs(R.transfer) ** 2
    markov = MarkovMatrix(P)
    error = markov.stochastic_error()
    if error > tol:
        raise ValidationError(f"propagator is not unitary: |R|² row/column sums deviate by {error:.3e}")
    return markov


def _check_input(P: MarkovMatrix, r: Configuration) -> None:
    if r.m != P.m:
        raise DimensionMismatchError("input configuration does not match transition matrix", P.m, r.m)


def sample_dp_batch(P: MarkovMatrix, r: Configuration, seed: int, count: int) -> list[Configuration]:
    """``count`` outputs from one seeded stream.

    Each boson, taken in nondecreasing site order, draws its destination by
    inverse CDF over increasing site index.
    """
    _check_input(P, r)
    if count < 0:
        raise ValidationError(f"sample count must be nonnegative, got {count}")
    rng = np.random.default_rng(seed)
    sources = r.sites
    cdfs = np.cumsum(P.P[list(sources)], axis=1) if sources else np.zeros((0, P.m))
    out: list[Configuration] = []
    for _ in range(count):
        occ = [0] * P.m
        for row in cdfs:
            dest = int(np.searchsorted(row, rng.random() * row[-1], side="right"))
            occ[min(dest, P.m - 1)] += 1
        out.append(Configuration(tuple(occ)))
    return out


def sample_dp(P: MarkovMatrix, r: Configuration, seed: int) -> Configuration:
    return sample_dp_batch(P, r, seed, 1)[0]


def dp_probability(P: MarkovMatrix, r: Configuration, s: Configuration) -> float:
    """Per(B)/s! with B[a, b] = P[in_a, out_b]."""
    if r.n != s.n:
        raise ValidationError(f"particle number mismatch: input has {r.n}, output has {s.n}")
    B = P.P[np.ix_(r.sites, s.sites)]
    return float(permanent(B).real / s.factorial)


def dp_distribution(
    P: MarkovMatrix,
    r: Configuration,
    threads: int = 1,
    enumeration_limit: int = ENUMERATION_LIMIT,
    max_particles: int = MAX_PARTICLES,
) -> OutcomeDistribution:
    """D_DP over all outcomes in lexicographic order.

    Input bosons are labelled, so no 1/r! factor appears even when r has
    repeated sites.
    """
    _check_input(P, r)
    if r.n > max_particles:
        raise GuardExceededError("max_particles", r.n, max_particles)
    check_enumeration_guard(P.m, r.n, enumeration_limit)
    outcomes = enumerate_configurations(P.m, r.n)

    def evaluate(occ: Occupation) -> float:
        return dp_probability(P, r, Configuration(occ))

    if threads > 1 and len(outcomes) > 64:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            probs = list(pool.map(evaluate, outcomes, chunksize=256))
    else:
        probs = [evaluate(occ) for occ in outcomes]
    return OutcomeDistribution(r.n, P.m, dict(zip(outcomes, probs)))


def dp_tuple_oracle(P: MarkovMatrix, r: Configuration, limit: int = TUPLE_ORACLE_LIMIT) -> OutcomeDistribution:
    """Aggregate all m^n ordered destination tuples; no permanents involved."""
    _check_input(P, r)
    sources = r.sites
    tuples = P.m ** len(sources)
    if tuples > limit:
        raise GuardExceededError("tuple_enumeration", tuples, limit)
    table = {occ: 0.0 for occ in enumerate_configurations(P.m, r.n)}
    for dests in itertools.product(range(P.m), repeat=len(sources)):
        weight = math.prod(P.P[src, dst] for src, dst in zip(sources, dests))
        occ = [0] * P.m
        for dst in dests:
            occ[dst] += 1
        table[tuple(occ)] += weight
    return OutcomeDistribution(r.n, P.m, table)


__all__ = [
    "dp_distribution",
    "dp_probability",
    "dp_tuple_oracle",
    "markov_matrix",
    "sample_dp",
    "sample_dp_batch",
]
