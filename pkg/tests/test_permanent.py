import math
import time

import numpy as np
import pytest

from bosonlab.core.models import Configuration, Propagator
from bosonlab.core.permanent import permanent, permanent_naive, submatrix_for_transition
from bosonlab.utils.exceptions import GuardExceededError, ValidationError


def complex_matrix(rng, k):
    return rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))


class TestPermanent:
    @pytest.mark.parametrize(
        "matrix,expected",
        [
            ([[1, 2], [3, 4]], 10),
            ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 450),
            (np.eye(5), 1),
            (np.ones((4, 4)), 24),
            ([[2.5]], 2.5),
        ],
    )
    def test_known_values(self, matrix, expected):
        assert permanent(np.asarray(matrix)) == pytest.approx(expected)

    def test_empty_matrix(self):
        assert permanent(np.zeros((0, 0))) == 1

    def test_agrees_with_permutation_sum(self, rng):
        for k in range(1, 7):
            for _ in range(5):
                M = complex_matrix(rng, k)
                assert abs(permanent(M) - permanent_naive(M)) <= 1e-10 * max(1.0, abs(permanent_naive(M)))

    def test_invariant_under_row_and_column_permutations(self, rng):
        M = complex_matrix(rng, 6)
        rows, cols = rng.permutation(6), rng.permutation(6)
        assert permanent(M[rows][:, cols]) == pytest.approx(permanent(M), rel=1e-10)
        assert permanent(M.T) == pytest.approx(permanent(M), rel=1e-10)

    def test_linear_in_each_row(self, rng):
        M = complex_matrix(rng, 5)
        extra = rng.standard_normal(5)
        scaled, summed = M.copy(), M.copy()
        scaled[2] *= 3 - 1j
        summed[2] += extra
        other = M.copy()
        other[2] = extra
        assert permanent(scaled) == pytest.approx((3 - 1j) * permanent(M), rel=1e-10)
        assert permanent(summed) == pytest.approx(permanent(M) + permanent(other), rel=1e-9)

    def test_zero_row(self, rng):
        M = complex_matrix(rng, 7)
        M[4] = 0
        assert abs(permanent(M)) <= 1e-9

    def test_size_guard(self):
        with pytest.raises(GuardExceededError) as info:
            permanent(np.ones((31, 31)))
        assert info.value.guard == "permanent_size"
        with pytest.raises(GuardExceededError):
            permanent_naive(np.ones((11, 11)))

    def test_non_square(self):
        with pytest.raises(ValidationError):
            permanent(np.ones((2, 3)))

    def test_size_twenty_is_fast(self, rng):
        permanent(complex_matrix(rng, 4))
        M = complex_matrix(rng, 20)
        start = time.perf_counter()
        value = permanent(M)
        assert time.perf_counter() - start < 5.0
        assert math.isfinite(abs(value))


class TestTransitionMatrix:
    def test_repeated_rows_and_columns(self):
        R = Propagator(np.arange(9, dtype=complex).reshape(3, 3))
        r = Configuration((2, 0, 1))
        s = Configuration((0, 1, 2))
        A = submatrix_for_transition(R, r, s).A
        # A[a, b] = R[out_b, in_a] with in = (0, 0, 2), out = (1, 2, 2)
        expected = np.array([[R.R[o, i] for o in (1, 2, 2)] for i in (0, 0, 2)])
        np.testing.assert_allclose(A, expected)

    def test_particle_number_mismatch(self, hom_propagator):
        with pytest.raises(ValidationError, match="particle number"):
            submatrix_for_transition(hom_propagator, Configuration((1, 1)), Configuration((1, 0)))
