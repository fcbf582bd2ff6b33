import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bosonlab.core.dynamics import (
    anderson_hopping,
    beamsplitter_schedule,
    clean_hopping,
    concat,
    evolve,
    generator_of,
    phase_schedule,
    quench,
    random_hopping,
    random_unitary,
    validate_schedule,
)
from bosonlab.core.lattice import box_lattice, chain_lattice
from bosonlab.core.models import HoppingSchedule, Segment, ViolationKind
from bosonlab.utils.exceptions import DimensionMismatchError, ValidationError


class TestEvolve:
    def test_beamsplitter(self, hom_propagator):
        expected = np.array([[1, -1], [1, 1]]) / math.sqrt(2)
        assert_allclose(hom_propagator.R, expected, atol=1e-12)
        assert hom_propagator.t == pytest.approx(math.pi / 4)

    def test_two_beamsplitters_swap(self, hom_schedule):
        R = evolve(concat(hom_schedule, hom_schedule)).R
        assert_allclose(R, [[0, -1], [1, 0]], atol=1e-12)

    def test_phase(self):
        R = evolve(phase_schedule(1, 0.3, 3)).R
        assert_allclose(np.diag(R), [1, np.exp(-0.3j), 1], atol=1e-12)
        assert_allclose(R - np.diag(np.diag(R)), 0, atol=1e-12)

    def test_phase_pi_flips_sign(self):
        R = evolve(phase_schedule(0, math.pi, 2)).R
        assert_allclose(R, [[-1, 0], [0, 1]], atol=1e-12)

    def test_zero_hamiltonian_is_identity(self):
        sched = HoppingSchedule.constant(np.zeros((4, 4)), 3.0)
        assert_allclose(evolve(sched).R, np.eye(4), atol=1e-14)

    def test_unitarity_over_random_schedules(self, rng, make_schedule):
        worst = 0.0
        for _ in range(100):
            worst = max(worst, evolve(make_schedule(5, 20, rng)).unitarity_error())
        assert worst <= 1e-9

    def test_later_segments_act_on_the_left(self, rng, make_schedule):
        first = make_schedule(4, 3, rng)
        second = make_schedule(4, 2, rng)
        combined = evolve(concat(first, second)).R
        assert_allclose(combined, evolve(second).R @ evolve(first).R, atol=1e-10)
        assert evolve(concat(first, second)).t == pytest.approx(first.total_time + second.total_time)

    def test_non_hermitian_segment(self):
        J = np.array([[0, 1], [0, 0]], dtype=complex)
        with pytest.raises(ValidationError, match="Hermitian"):
            evolve(HoppingSchedule.constant(J, 1.0))


class TestSchedules:
    def test_beamsplitter_needs_neighbours(self):
        with pytest.raises(ValidationError, match="neighbours"):
            beamsplitter_schedule(0, 2, 3)

    def test_beamsplitter_on_box(self):
        spec = box_lattice((2, 2), [(0, 0)])
        a, b = spec.index_of[(0, 0)], spec.index_of[(1, 0)]
        sched = beamsplitter_schedule(a, b, spec.m, spec)
        assert validate_schedule(sched, spec).ok

    def test_empty_schedule_rejected(self):
        with pytest.raises(ValidationError):
            HoppingSchedule(())

    def test_mixed_sizes_rejected(self):
        with pytest.raises(DimensionMismatchError):
            HoppingSchedule((Segment(1.0, np.zeros((2, 2))), Segment(1.0, np.zeros((3, 3)))))

    @pytest.mark.parametrize("duration", [0.0, -1.0, math.inf])
    def test_bad_duration(self, duration):
        with pytest.raises(ValidationError):
            Segment(duration, np.zeros((2, 2)))


class TestValidation:
    def test_clean_schedule_passes(self, rng, make_schedule):
        spec = chain_lattice(6, [0])
        assert validate_schedule(make_schedule(6, 4, rng), spec).ok

    def test_long_range_hop(self):
        spec = chain_lattice(6, [0])
        J = np.zeros((6, 6), dtype=complex)
        J[0, 5] = J[5, 0] = 0.5
        report = validate_schedule(HoppingSchedule.constant(J, 1.0), spec)
        assert not report.ok
        assert [(v.i, v.j) for v in report.of_kind(ViolationKind.ADJACENCY)] == [(0, 5)]

    def test_magnitude(self):
        spec = chain_lattice(3, [0])
        J = np.zeros((3, 3), dtype=complex)
        J[0, 1] = J[1, 0] = 1.5
        report = validate_schedule(HoppingSchedule.constant(J, 1.0), spec)
        assert len(report) == 1
        (violation,) = report.violations
        assert violation.kind is ViolationKind.MAGNITUDE
        assert violation.value == pytest.approx(1.5)

    def test_non_hermitian_reported_with_segment(self):
        spec = chain_lattice(3, [0])
        good = np.zeros((3, 3), dtype=complex)
        bad = good.copy()
        bad[1, 2] = 0.5
        sched = HoppingSchedule((Segment(1.0, good), Segment(1.0, bad)))
        (violation,) = validate_schedule(sched, spec).of_kind(ViolationKind.HERMITIAN)
        assert (violation.segment, violation.i, violation.j) == (1, 1, 2)

    def test_diagonal_is_unconstrained(self):
        spec = chain_lattice(2, [0])
        J = np.diag([5.0, -7.0])
        assert validate_schedule(HoppingSchedule.constant(J, 1.0), spec).ok

    def test_size_mismatch(self, hom_schedule):
        with pytest.raises(DimensionMismatchError):
            validate_schedule(hom_schedule, chain_lattice(3, [0]))

    def test_generator_of_random_unitary_is_flagged(self):
        U = random_unitary(5, seed=3)
        H = generator_of(U)
        assert_allclose(evolve(HoppingSchedule.constant(H, 1.0)).R, U, atol=1e-9)
        report = validate_schedule(HoppingSchedule.constant(H, 1.0), chain_lattice(5, [0]))
        assert report.of_kind(ViolationKind.ADJACENCY)


class TestHoppingSources:
    def test_anderson_is_deterministic_per_seed(self):
        spec = chain_lattice(8, [0])
        assert_allclose(anderson_hopping(spec, 2.0, 5), anderson_hopping(spec, 2.0, 5))
        assert not np.allclose(anderson_hopping(spec, 2.0, 5), anderson_hopping(spec, 2.0, 6))

    def test_anderson_structure(self):
        spec = chain_lattice(8, [0])
        J = anderson_hopping(spec, 3.0, 1)
        assert np.all(np.abs(np.diag(J)) <= 3.0)
        assert_allclose(np.diag(J, 1), 1.0)
        assert validate_schedule(HoppingSchedule.constant(J, 1.0), spec).ok

    def test_clean_has_no_disorder(self):
        J = clean_hopping(box_lattice((3, 3), [(0, 0)]))
        assert_allclose(np.diag(J), 0.0)
        assert np.count_nonzero(J) == 2 * 12

    def test_random_hopping(self):
        spec = box_lattice((3, 3), [(0, 0)])
        J = random_hopping(spec, 11)
        assert_allclose(J, random_hopping(spec, 11))
        assert_allclose(J, J.conj().T)
        assert validate_schedule(HoppingSchedule.constant(J, 1.0), spec).ok

    def test_negative_disorder(self):
        with pytest.raises(ValidationError):
            anderson_hopping(chain_lattice(3, [0]), -1.0, 0)


class TestQuench:
    def test_matches_evolve(self):
        spec = chain_lattice(7, [3])
        J = anderson_hopping(spec, 1.0, 2)
        props = quench(J, [0.0, 0.5, 2.0])
        assert_allclose(props[0].R, np.eye(7), atol=1e-12)
        for prop in props[1:]:
            assert_allclose(prop.R, evolve(HoppingSchedule.constant(J, prop.t)).R, atol=1e-10)

    def test_negative_time(self):
        with pytest.raises(ValidationError):
            quench(np.zeros((2, 2)), [-1.0])

    def test_random_unitary_is_unitary(self):
        U = random_unitary(6, seed=0)
        assert_allclose(U.conj().T @ U, np.eye(6), atol=1e-12)
        assert_allclose(U, random_unitary(6, seed=0))
