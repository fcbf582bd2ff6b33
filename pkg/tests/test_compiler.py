import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import unitary_group

from bosonlab.core.compiler import (
    circuit_to_schedule,
    clements_decompose,
    compile_on_lattice,
    depth_report,
    gate_matrix,
    hopping_time,
    reconstruct,
    verify_schedule,
)
from bosonlab.core.dynamics import evolve, random_unitary, validate_schedule
from bosonlab.core.lattice import box_lattice, build_lattice, chain_lattice
from bosonlab.core.models import CompiledCircuit, Gate, GateKind
from bosonlab.utils.exceptions import DimensionMismatchError, GuardExceededError, ValidationError


class TestDecomposition:
    def test_identity_compiles_to_nothing(self):
        circuit = clements_decompose(np.eye(5))
        assert circuit.gate_count == 0
        assert circuit.depth == 0
        assert_allclose(circuit.phases, 0.0, atol=1e-12)
        assert_allclose(reconstruct(circuit), np.eye(5), atol=1e-12)

    def test_beamsplitter_gate_matches_hopping(self, hom_propagator):
        assert_allclose(gate_matrix(math.pi / 4, 0.0), hom_propagator.R, atol=1e-12)

    def test_single_beamsplitter(self, hom_propagator):
        circuit = clements_decompose(hom_propagator.R)
        assert circuit.gate_count == 1
        assert_allclose(reconstruct(circuit), hom_propagator.R, atol=1e-12)

    @pytest.mark.parametrize("m", [4, 8, 12])
    def test_haar_unitaries(self, m):
        U = random_unitary(m, seed=m)
        circuit = clements_decompose(U)
        assert circuit.gate_count == m * (m - 1) // 2
        assert circuit.depth <= m
        assert np.max(np.abs(reconstruct(circuit) - U)) <= 1e-9
        assert all(0 <= g.theta <= math.pi / 2 for g in circuit.gates)
        assert all(0 <= p < 2 * math.pi for p in circuit.phases)

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [4, 8, 12])
    def test_fifty_haar_unitaries_per_size(self, m):
        for seed in range(50):
            U = random_unitary(m, seed=1000 * m + seed)
            circuit = clements_decompose(U)
            assert circuit.gate_count == m * (m - 1) // 2
            assert circuit.depth <= m
            assert np.max(np.abs(reconstruct(circuit) - U)) <= 1e-8
            sched = circuit_to_schedule(circuit)
            assert np.max(np.abs(evolve(sched).R - U)) <= 1e-8
            assert validate_schedule(sched, chain_lattice(m, [0])).ok

    def test_scipy_haar_samples(self):
        for seed in range(5):
            U = unitary_group.rvs(6, random_state=seed)
            assert np.max(np.abs(reconstruct(clements_decompose(U)) - U)) <= 1e-9

    def test_layers_never_share_a_mode(self):
        circuit = clements_decompose(random_unitary(7, seed=1))
        for layer in circuit.layers:
            modes = [mode for gate in layer for mode in gate.modes]
            assert len(modes) == len(set(modes))

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError, match="not unitary"):
            clements_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_mode_guard(self):
        with pytest.raises(GuardExceededError):
            clements_decompose(np.eye(6), max_modes=4)

    def test_overlapping_layer_is_rejected(self):
        layer = (Gate(GateKind.BEAMSPLITTER, 0, 1, 0.3), Gate(GateKind.BEAMSPLITTER, 1, 2, 0.2))
        with pytest.raises(ValidationError, match="overlapping"):
            reconstruct(CompiledCircuit(3, (layer,), (0.0, 0.0, 0.0)))


class TestSchedules:
    @pytest.mark.parametrize("m", [3, 6])
    def test_schedule_reproduces_the_unitary(self, m):
        U = random_unitary(m, seed=40 + m)
        circuit = clements_decompose(U)
        sched = circuit_to_schedule(circuit)
        assert verify_schedule(circuit, sched) <= 1e-9
        assert np.max(np.abs(evolve(sched).R - U)) <= 1e-9
        assert validate_schedule(sched, chain_lattice(m, [0])).ok

    def test_identity_schedule_is_one_idle_segment(self):
        sched = circuit_to_schedule(clements_decompose(np.eye(3)))
        assert len(sched) == 1
        assert hopping_time(sched) == 0.0
        assert_allclose(evolve(sched).R, np.eye(3), atol=1e-14)

    def test_phase_pi_becomes_onsite_energy_pi(self):
        circuit = CompiledCircuit(2, (), (math.pi, 0.0))
        (segment,) = circuit_to_schedule(circuit)
        assert segment.J[0, 0] == pytest.approx(math.pi)
        assert segment.J[1, 1] == 0
        assert_allclose(evolve(circuit_to_schedule(circuit)).R, np.diag([-1, 1]), atol=1e-12)

    def test_depth_report(self):
        m = 6
        circuit = clements_decompose(random_unitary(m, seed=3))
        report = depth_report(circuit, n=2, beta=2.0, d=1)
        assert report.m == m
        assert report.two_mode_gates == report.sequential_depth == m * (m - 1) // 2
        assert report.layers == circuit.depth
        assert 0 < report.hopping_time <= m * math.pi / 2
        assert report.total_time >= report.hopping_time
        assert report.t_hard_scale == pytest.approx(8.0)


class TestLatticeCompilation:
    def test_two_dimensional_box(self):
        spec = box_lattice((3, 3), [(0, 0), (2, 2)])
        U = random_unitary(spec.m, seed=9)
        circuit, sched, path = compile_on_lattice(U, spec)
        assert sorted(path) == list(range(spec.m))
        assert validate_schedule(sched, spec).ok
        assert np.max(np.abs(evolve(sched).R - U)) <= 1e-9
        assert circuit.gate_count == spec.m * (spec.m - 1) // 2

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            compile_on_lattice(np.eye(4), chain_lattice(5, [0]))

    def test_lattice_with_ancilla_holes(self):
        spec = build_lattice(4, 2, 2, 2)
        assert spec.m == 32
        U = random_unitary(spec.m, seed=1)
        circuit, sched, path = compile_on_lattice(U, spec)
        assert sorted(path) == list(range(spec.m))
        assert all(spec.adjacency[a, b] for a, b in zip(path, path[1:]))
        assert validate_schedule(sched, spec).ok
        assert np.max(np.abs(evolve(sched).R - U)) <= 1e-9
