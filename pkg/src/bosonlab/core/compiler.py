"""Rectangular-mesh decomposition of unitaries into nearest-neighbour gates.

Gate convention: T(θ, φ) acts on modes (i, i+1) as
[[e^{iφ}cos θ, −sin θ], [e^{iφ}sin θ, cos θ]], so T(π/4, 0) is the balanced
beamsplitter produced by :func:`bosonlab.core.dynamics.beamsplitter_schedule`.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from bosonlab.core.bounds import hard_timescale
from bosonlab.core.dynamics import evolve
from bosonlab.core.lattice import snake_path
from bosonlab.core.models import (
    CompiledCircuit,
    DepthReport,
    Gate,
    GateKind,
    HoppingSchedule,
    LatticeSpec,
    Segment,
)
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import DimensionMismatchError, GuardExceededError, ValidationError

logger = get_logger(__name__)

UNITARY_TOL = 1e-10
COMPILE_MAX_MODES = 64
NULL_TOL = 1e-14
TWO_PI = 2.0 * math.pi


def gate_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    e = np.exp(1j * phi)
    return np.array([[e * c, -s], [e * s, c]], dtype=np.complex128)


def _as_unitary(U: np.ndarray, tol: float, max_modes: int) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionMismatchError("unitary must be square", "square", U.shape)
    m = U.shape[0]
    if m > max_modes:
        raise GuardExceededError("compile_max_modes", m, max_modes)
    deviation = float(np.max(np.abs(U.conj().T @ U - np.eye(m)), initial=0.0))
    if deviation > tol:
        raise ValidationError(f"matrix is not unitary: max |U†U − I| = {deviation:.3e}")
    return U


def _wrap(angle: float) -> float:
    wrapped = float(angle) % TWO_PI
    return 0.0 if math.isclose(wrapped, TWO_PI) else wrapped


def _pack_layers(m: int, gates: Sequence[Gate]) -> tuple[tuple[Gate, ...], ...]:
    """Greedy as-soon-as-possible layering that keeps per-mode order."""
    last = [-1] * m
    layers: list[list[Gate]] = []
    for gate in gates:
        layer = max(last[gate.i], last[gate.j]) + 1
        if layer == len(layers):
            layers.append([])
        layers[layer].append(gate)
        last[gate.i] = last[gate.j] = layer
    return tuple(tuple(layer) for layer in layers)


def clements_decompose(
    U: np.ndarray,
    tol: float = UNITARY_TOL,
    max_modes: int = COMPILE_MAX_MODES,
    null_tol: float = NULL_TOL,
) -> CompiledCircuit:
    """Null U's lower triangle alternately from the right and the left.

    Left-side gates are then moved through the diagonal remainder, leaving a
    mesh of m(m−1)/2 two-mode gates followed by output phases. Entries that
    are already zero get no gate, so U = I compiles to an empty mesh.
    """
    V = _as_unitary(U, tol, max_modes).copy()
    m = V.shape[0]
    right: list[Gate] = []
    left: list[Gate] = []

    for k, i in enumerate(range(m - 2, -1, -1)):
        if k % 2 == 0:
            for j in reversed(range(m - 1 - i)):
                row = i + j + 1
                a, b = V[row, j], V[row, j + 1]
                if abs(a) <= null_tol:
                    continue
                theta = math.atan2(abs(a), abs(b))
                phi = _wrap(np.angle(a) - np.angle(b))
                V[:, j : j + 2] = V[:, j : j + 2] @ gate_matrix(theta, phi).conj().T
                right.append(Gate(GateKind.BEAMSPLITTER, j, j + 1, theta, phi))
        else:
            for j in range(m - 1 - i):
                row = i + j + 1
                a, b = V[row, j], V[row - 1, j]
                if abs(a) <= null_tol:
                    continue
                theta = math.atan2(abs(a), abs(b))
                phi = _wrap(np.angle(a) - np.angle(b) + math.pi)
                V[row - 1 : row + 1, :] = gate_matrix(theta, phi) @ V[row - 1 : row + 1, :]
                left.append(Gate(GateKind.BEAMSPLITTER, row - 1, row, theta, phi))

    # T†(θ, φ)·diag(e^{iα}, e^{iβ}) = diag(e^{i(β−φ+π)}, e^{iβ})·T(θ, α−β+π)
    diag_phase = np.angle(np.diag(V)).astype(float)
    moved: list[Gate] = []
    for gate in reversed(left):
        alpha, beta = diag_phase[gate.i], diag_phase[gate.j]
        moved.append(Gate(GateKind.BEAMSPLITTER, gate.i, gate.j, gate.theta, _wrap(alpha - beta + math.pi)))
        diag_phase[gate.i] = _wrap(beta - gate.phi + math.pi)

    circuit = CompiledCircuit(
        m=m,
        layers=_pack_layers(m, right + moved),
        phases=tuple(_wrap(p) for p in diag_phase),
    )
    logger.debug("compile.decomposed", m=m, gates=circuit.gate_count, depth=circuit.depth)
    return circuit


def _check_layers(circuit: CompiledCircuit) -> None:
    for index, layer in enumerate(circuit.layers):
        used: set[int] = set()
        for gate in layer:
            if gate.kind is not GateKind.BEAMSPLITTER or gate.j != gate.i + 1:
                raise ValidationError(f"layer {index} holds a gate that is not a nearest-neighbour pair: {gate}")
            if gate.i < 0 or gate.j >= circuit.m:
                raise ValidationError(f"gate {gate} outside 0..{circuit.m - 1}")
            if used & set(gate.modes):
                raise ValidationError(f"layer {index} has overlapping gates on modes {sorted(used & set(gate.modes))}")
            used.update(gate.modes)


def reconstruct(circuit: CompiledCircuit) -> np.ndarray:
    """Multiply out the layers, then the output phases."""
    _check_layers(circuit)
    U = np.eye(circuit.m, dtype=np.complex128)
    for layer in circuit.layers:
        for gate in layer:
            U[gate.i : gate.i + 2, :] = gate_matrix(gate.theta, gate.phi) @ U[gate.i : gate.i + 2, :]
    return np.exp(1j * np.asarray(circuit.phases))[:, None] * U


def _diagonal_segment(m: int, phases: dict[int, float]) -> Optional[Segment]:
    # exp(−i·J_kk) = e^{iφ} with J_kk = (−φ) mod 2π
    J = np.zeros((m, m), dtype=np.complex128)
    for k, phi in phases.items():
        J[k, k] = _wrap(-phi)
    if not np.any(J):
        return None
    return Segment(1.0, J)


def circuit_to_schedule(circuit: CompiledCircuit) -> HoppingSchedule:
    """One phase segment and one hopping segment per layer, then the output phases.

    Hopping in a layer runs for τ = max θ with couplings ∓iθ/τ, so every
    |J_ij| ≤ 1. An all-identity circuit yields one zero segment of unit
    length.
    """
    _check_layers(circuit)
    m = circuit.m
    segments: list[Segment] = []
    for layer in circuit.layers:
        phase_seg = _diagonal_segment(m, {gate.i: gate.phi for gate in layer})
        if phase_seg is not None:
            segments.append(phase_seg)
        tau = max((gate.theta for gate in layer), default=0.0)
        if tau <= 0:
            continue
        J = np.zeros((m, m), dtype=np.complex128)
        for gate in layer:
            J[gate.i, gate.j] = -1j * gate.theta / tau
            J[gate.j, gate.i] = 1j * gate.theta / tau
        segments.append(Segment(tau, J))
    final = _diagonal_segment(m, dict(enumerate(circuit.phases)))
    if final is not None:
        segments.append(final)
    if not segments:
        segments.append(Segment(1.0, np.zeros((m, m), dtype=np.complex128)))
    return HoppingSchedule(tuple(segments))


def hopping_time(sched: HoppingSchedule) -> float:
    """Total duration of segments with off-diagonal couplings."""
    return float(sum(seg.duration for seg in sched if np.any(seg.J - np.diag(np.diag(seg.J)))))


def compile_on_lattice(
    U: np.ndarray,
    spec: LatticeSpec,
    tol: float = UNITARY_TOL,
    max_modes: int = COMPILE_MAX_MODES,
) -> tuple[CompiledCircuit, HoppingSchedule, list[int]]:
    """Compile a unitary on lattice sites along a nearest-neighbour snake path.

    The circuit is expressed in path positions; the returned schedule acts on
    lattice indices. The path is returned as the third element.
    """
    U = _as_unitary(U, tol, max_modes)
    if U.shape[0] != spec.m:
        raise DimensionMismatchError("unitary and lattice disagree on m", spec.m, U.shape[0])
    path = snake_path(spec)
    order = np.asarray(path)
    circuit = clements_decompose(U[np.ix_(order, order)], tol, max_modes)
    on_path = circuit_to_schedule(circuit)
    segments = []
    for seg in on_path:
        J = np.zeros_like(seg.J)
        J[np.ix_(order, order)] = seg.J
        segments.append(Segment(seg.duration, J))
    return circuit, HoppingSchedule(tuple(segments)), path


def depth_report(
    circuit: CompiledCircuit,
    n: int,
    beta: float,
    d: int,
    schedule: Optional[HoppingSchedule] = None,
) -> DepthReport:
    """Layer and gate counts, schedule time and the n^{1+β/d} hardness scale."""
    sched = schedule if schedule is not None else circuit_to_schedule(circuit)
    return DepthReport(
        m=circuit.m,
        layers=circuit.depth,
        two_mode_gates=circuit.gate_count,
        sequential_depth=circuit.gate_count,
        hopping_time=hopping_time(sched),
        total_time=float(sum(seg.duration for seg in sched if np.any(seg.J))),
        t_hard_scale=hard_timescale(n, beta, d),
    )


def verify_schedule(circuit: CompiledCircuit, sched: HoppingSchedule) -> float:
    """Max entrywise gap between evolve(sched) and the circuit unitary."""
    return float(np.max(np.abs(evolve(sched).R - reconstruct(circuit))))


__all__ = [
    "circuit_to_schedule",
    "clements_decompose",
    "compile_on_lattice",
    "depth_report",
    "gate_matrix",
    "hopping_time",
    "reconstruct",
    "verify_schedule",
]
