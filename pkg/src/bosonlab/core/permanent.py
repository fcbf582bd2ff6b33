"""Exact matrix permanents and the repeated row/column transition matrix."""

from __future__ import annotations

import itertools

import numpy as np
from numba import njit

from bosonlab.core.models import Configuration, Propagator, TransitionMatrix
from bosonlab.utils.exceptions import DimensionMismatchError, GuardExceededError, ValidationError

PERMANENT_SIZE_LIMIT = 30


@njit(cache=True, nogil=True)
def _glynn_gray(M):  # pragma: no cover - compiled
    k = M.shape[0]
    sums = np.zeros(k, dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            sums[j] += M[i, j]
    delta = np.ones(k, dtype=np.int8)

    prod = 1.0 + 0.0j
    for j in range(k):
        prod *= sums[j]
    total = prod
    sign = 1.0
    steps = 1 << (k - 1)
    for g in range(1, steps):
        # the Gray code flips the row one past the lowest set bit of g
        row = 1
        while ((g >> (row - 1)) & 1) == 0:
            row += 1
        delta[row] = -delta[row]
        factor = 2.0 * delta[row]
        for j in range(k):
            sums[j] += factor * M[row, j]
        sign = -sign
        prod = 1.0 + 0.0j
        for j in range(k):
            prod *= sums[j]
        total += sign * prod
    return total / steps


def _as_square(M: np.ndarray) -> np.ndarray:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError("permanent needs a square matrix", "square", arr.shape)
    return arr


def permanent(M: np.ndarray, limit: int = PERMANENT_SIZE_LIMIT) -> complex:
    """Per(M) by Glynn's formula over a Gray code, O(2^k·k).

    The empty matrix has permanent 1.
    """
    arr = _as_square(M)
    k = arr.shape[0]
    if k > limit:
        raise GuardExceededError("permanent_size", k, limit)
    if k == 0:
        return 1.0 + 0.0j
    if k == 1:
        return complex(arr[0, 0])
    return complex(_glynn_gray(np.ascontiguousarray(arr)))


def permanent_naive(M: np.ndarray) -> complex:
    """Sum over all k! permutations; reference for small matrices only."""
    arr = _as_square(M)
    k = arr.shape[0]
    if k > 10:
        raise GuardExceededError("naive_permanent_size", k, 10)
    rows = np.arange(k)
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(k)):
        total += np.prod(arr[rows, list(perm)])
    return complex(total)


def submatrix_for_transition(R: Propagator, r: Configuration, s: Configuration) -> TransitionMatrix:
    """A[a, b] = R[out_b, in_a] with sites repeated by occupation, nondecreasing."""
    if r.m != R.m or s.m != R.m:
        raise DimensionMismatchError("configurations must live on the propagator's modes", R.m, (r.m, s.m))
    if r.n != s.n:
        raise ValidationError(f"particle number mismatch: input has {r.n}, output has {s.n}")
    rows = np.asarray(r.sites, dtype=np.int64)
    cols = np.asarray(s.sites, dtype=np.int64)
    A = R.R[np.ix_(cols, rows)].T
    return TransitionMatrix(np.ascontiguousarray(A), r, s)


__all__ = [
    "PERMANENT_SIZE_LIMIT",
    "permanent",
    "permanent_naive",
    "submatrix_for_transition",
]
