"""Plain-text codecs for matrices, schedules, lattices, circuits and result tables.

Floats are written with ``repr`` so a value read back is bit-identical.
"""

from __future__ import annotations

import csv
import io
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from bosonlab.core.lattice import boson_sites
from bosonlab.core.models import (
    CheckResult,
    CompiledCircuit,
    Configuration,
    Gate,
    GateKind,
    HoppingSchedule,
    LatticeSpec,
    OutcomeDistribution,
    Segment,
)
from bosonlab.utils.exceptions import ValidationError

REPORT_COLUMNS = ("check", "params", "measured", "envelope", "ratio", "pass")
CIRCUIT_COLUMNS = ("layer", "kind", "i", "j", "theta", "phi")


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _lines(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


# matrices -----------------------------------------------------------------


def matrix_to_text(M: np.ndarray) -> str:
    M = np.asarray(M, dtype=np.complex128)
    rows = [str(M.shape[0])]
    for row in M:
        rows.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(rows) + "\n"


def _parse_matrix(lines: Sequence[str], start: int = 0) -> tuple[np.ndarray, int]:
    try:
        m = int(lines[start])
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"expected a mode count on line {start + 1}") from exc
    if m < 1:
        raise ValidationError(f"mode count must be positive, got {m}")
    M = np.zeros((m, m), dtype=np.complex128)
    for r in range(m):
        try:
            entries = lines[start + 1 + r].split()
        except IndexError as exc:
            raise ValidationError(f"matrix block ends after {r} of {m} rows") from exc
        if len(entries) != m:
            raise ValidationError(f"row {r} has {len(entries)} entries, expected {m}")
        for c, entry in enumerate(entries):
            try:
                re_part, im_part = entry.split(",")
                M[r, c] = complex(float(re_part), float(im_part))
            except ValueError as exc:
                raise ValidationError(f"bad matrix entry '{entry}' at ({r}, {c})") from exc
    return M, start + 1 + m


def matrix_from_text(text: str) -> np.ndarray:
    lines = _lines(text)
    M, end = _parse_matrix(lines)
    if end != len(lines):
        raise ValidationError("trailing content after matrix block")
    return M


# schedules ----------------------------------------------------------------


def schedule_to_text(sched: HoppingSchedule) -> str:
    parts = []
    for seg in sched:
        parts.append(f"duration {seg.duration!r}\n" + matrix_to_text(seg.J))
    return "".join(parts)


def schedule_from_text(text: str) -> HoppingSchedule:
    lines = _lines(text)
    segments: list[Segment] = []
    pos = 0
    while pos < len(lines):
        head = lines[pos].split()
        if len(head) != 2 or head[0] != "duration":
            raise ValidationError(f"expected 'duration <x>' at block {len(segments) + 1}, got '{lines[pos]}'")
        try:
            duration = float(head[1])
        except ValueError as exc:
            raise ValidationError(f"bad duration '{head[1]}'") from exc
        J, pos = _parse_matrix(lines, pos + 1)
        segments.append(Segment(duration, J))
    if not segments:
        raise ValidationError("schedule file holds no segments")
    return HoppingSchedule(tuple(segments))


# lattices -----------------------------------------------------------------

_LATTICE_KEYS = ("d", "n", "beta", "c1", "m", "side", "L")


def lattice_to_text(spec: LatticeSpec) -> str:
    lines = [f"{key} = {_fmt(getattr(spec, key))}" for key in _LATTICE_KEYS]
    lines.append("occupied = " + " ".join(str(i) for i in boson_sites(spec)))
    lines.extend("S " + " ".join(str(x) for x in c) for c in spec.coords)
    lines.extend("A " + " ".join(str(x) for x in c) for c in spec.ancilla_coords)
    return "\n".join(lines) + "\n"


def lattice_from_text(text: str) -> LatticeSpec:
    header: dict[str, str] = {}
    sites: list[tuple[int, ...]] = []
    ancillas: list[tuple[int, ...]] = []
    for line in _lines(text):
        if "=" in line:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
        elif line[0] in "SA":
            coord = tuple(int(x) for x in line[1:].split())
            (sites if line[0] == "S" else ancillas).append(coord)
        else:
            raise ValidationError(f"unrecognised lattice line '{line}'")
    missing = [key for key in (*_LATTICE_KEYS, "occupied") if key not in header]
    if missing:
        raise ValidationError(f"lattice text missing keys: {', '.join(missing)}")
    return LatticeSpec(
        d=int(header["d"]),
        n=int(header["n"]),
        beta=float(header["beta"]),
        c1=float(header["c1"]),
        m=int(header["m"]),
        side=int(header["side"]),
        coords=tuple(sites),
        ancilla_coords=tuple(ancillas),
        occupied=tuple(int(x) for x in header["occupied"].split()),
        L=float(header["L"]),
    )


# distributions and samples -------------------------------------------------


def _occ_text(occ: Sequence[int]) -> str:
    return "-".join(str(x) for x in occ)


def _parse_occ(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.strip().split("-"))
    except ValueError as exc:
        raise ValidationError(f"bad occupation '{text}'") from exc


def distribution_to_csv(dist: OutcomeDistribution) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("occ", "probability"))
    for occ, p in dist.items():
        writer.writerow((_occ_text(occ), _fmt(float(p))))
    return buffer.getvalue()


def distribution_from_csv(text: str) -> OutcomeDistribution:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or list(reader.fieldnames) != ["occ", "probability"]:
        raise ValidationError("distribution CSV must have header 'occ,probability'")
    entries: dict[tuple[int, ...], float] = {}
    for row in reader:
        entries[_parse_occ(row["occ"])] = float(row["probability"])
    if not entries:
        raise ValidationError("distribution CSV has no rows")
    first = next(iter(entries))
    return OutcomeDistribution(sum(first), len(first), entries)


def samples_to_text(samples: Iterable[Configuration]) -> str:
    return "".join(" ".join(str(x) for x in s.occ) + "\n" for s in samples)


def samples_from_text(text: str) -> list[Configuration]:
    return [Configuration(tuple(int(x) for x in line.split())) for line in _lines(text)]


# circuits -----------------------------------------------------------------


def circuit_to_text(circuit: CompiledCircuit) -> str:
    """One line per gate; output phases that are exactly zero are omitted."""
    rows = []
    for index, layer in enumerate(circuit.layers):
        for gate in layer:
            rows.append((index, gate.kind.value, gate.i, gate.j, _fmt(gate.theta), _fmt(gate.phi)))
    for gate in circuit.phase_gates:
        if gate.phi != 0.0:
            rows.append((circuit.depth, gate.kind.value, gate.i, gate.j, _fmt(0.0), _fmt(gate.phi)))
    return "".join(",".join(str(x) for x in row) + "\n" for row in rows)


def circuit_from_text(text: str, m: int) -> CompiledCircuit:
    layers: dict[int, list[Gate]] = {}
    phases = [0.0] * m
    for line in _lines(text):
        fields = line.split(",")
        if len(fields) != len(CIRCUIT_COLUMNS):
            raise ValidationError(f"circuit line needs {len(CIRCUIT_COLUMNS)} fields: '{line}'")
        layer, kind, i, j = int(fields[0]), GateKind(fields[1]), int(fields[2]), int(fields[3])
        theta, phi = float(fields[4]), float(fields[5])
        if kind is GateKind.PHASE:
            phases[i] = phi
        else:
            layers.setdefault(layer, []).append(Gate(kind, i, j, theta, phi))
    ordered = tuple(tuple(layers[k]) for k in sorted(layers))
    return CompiledCircuit(m=m, layers=ordered, phases=tuple(phases))


# result tables ------------------------------------------------------------


def _params_text(params: Mapping[str, Any]) -> str:
    return ";".join(f"{key}={_fmt(value)}" for key, value in params.items())


def report_to_csv(rows: Iterable[CheckResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(
            (row.check, _params_text(row.params), _fmt(row.measured), _fmt(row.envelope), _fmt(row.ratio), _fmt(row.passed))
        )
    return buffer.getvalue()


def table_to_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    """Generic CSV with a fixed column order, used for sweep tables."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(tuple(_fmt(row[col]) for col in columns))
    return buffer.getvalue()


__all__ = [
    "circuit_from_text",
    "circuit_to_text",
    "distribution_from_csv",
    "distribution_to_csv",
    "lattice_from_text",
    "lattice_to_text",
    "matrix_from_text",
    "matrix_to_text",
    "report_to_csv",
    "samples_from_text",
    "samples_to_text",
    "schedule_from_text",
    "schedule_to_text",
    "table_to_csv",
]
