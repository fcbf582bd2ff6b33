"""Lattice geometry: site coordinates, boson placement and the length scale L."""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Optional, Sequence

import numpy as np

from bosonlab.core.models import Configuration, Coordinate, LatticeSpec
from bosonlab.monitoring.logging import get_logger
from bosonlab.utils.exceptions import ValidationError

logger = get_logger(__name__)

SUPPORTED_DIMENSIONS = (1, 2, 3)
PATH_SEARCH_BUDGET = 200_000


def _ceil_root(value: int, d: int) -> int:
    """Smallest integer s with s**d >= value."""
    s = max(1, int(round(value ** (1.0 / d))))
    while s**d < value:
        s += 1
    while s > 1 and (s - 1) ** d >= value:
        s -= 1
    return s


def _floor_root(num: int, den: int, d: int) -> int:
    """Largest integer s with s**d * den <= num."""
    s = max(1, int((num / den) ** (1.0 / d)))
    while (s + 1) ** d * den <= num:
        s += 1
    while s > 1 and s**d * den > num:
        s -= 1
    return s


def _half_min_spacing(points: Sequence[Coordinate], fallback: float) -> float:
    if len(points) < 2:
        return fallback
    arr = np.asarray(points, dtype=float)
    diff = arr[:, None, :] - arr[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(dist, np.inf)
    return float(dist.min()) / 2.0


def _ancilla_cell(boson: Coordinate, taken: set[Coordinate], side: int) -> Optional[Coordinate]:
    # +1 then -1 along the last axis, then the same along earlier axes
    d = len(boson)
    for axis in reversed(range(d)):
        for step in (1, -1):
            cell = list(boson)
            cell[axis] += step
            candidate = tuple(cell)
            if 0 <= candidate[axis] < side and candidate not in taken:
                return candidate
    # packed grids: nearest free cell in Manhattan distance, ties row-major
    free = [c for c in itertools.product(range(side), repeat=d) if c not in taken]
    if not free:
        return None
    return min(free, key=lambda c: (sum(abs(a - b) for a, b in zip(c, boson)), c))


def _assemble(
    d: int,
    n: int,
    beta: float,
    c1: float,
    side: int,
    ordinary: Iterable[Coordinate],
    bosons: Sequence[Coordinate],
    ancillas: Sequence[Coordinate],
    L: float,
) -> LatticeSpec:
    coords = tuple(sorted(ordinary))
    index = {coord: idx for idx, coord in enumerate(coords)}
    occupied = tuple(sorted(index[b] for b in bosons))
    return LatticeSpec(
        d=d,
        n=n,
        beta=float(beta),
        c1=float(c1),
        m=len(coords),
        side=side,
        coords=coords,
        ancilla_coords=tuple(sorted(ancillas)),
        occupied=occupied,
        L=float(L),
    )


def build_lattice(n: int, beta: float, c1: float, d: int) -> LatticeSpec:
    """Place n bosons on a regular sublattice of a d-dimensional box.

    m = round(c1·n^beta) ordinary sites plus one ancilla per boson fill a box
    of side ceil((m+n)^(1/d)). Bosons sit on a grid of spacing
    floor(((m+n)/n)^(1/d)). In one dimension the ancillas take the cells
    after the last ordinary site so the chain stays connected, and the
    spacing shrinks to floor((m-1)/(n-1)) when the bosons would not fit on
    the m sites. In higher dimensions an ancilla goes next to its boson, or
    to the nearest free cell when the grid is packed.
    """
    if d not in SUPPORTED_DIMENSIONS:
        raise ValidationError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {d}")
    if n < 1:
        raise ValidationError(f"need at least one boson, got n={n}")
    if not c1 > 0:
        raise ValidationError(f"c1 must be positive, got {c1}")
    if beta < 1:
        raise ValidationError(f"beta must be at least 1, got {beta}")

    raw_m = c1 * n**beta
    if raw_m < n:
        raise ValidationError(f"c1·n^beta = {raw_m:g} is smaller than n = {n}")
    m = int(math.floor(raw_m + 0.5))
    total = m + n
    side = _ceil_root(total, d)
    spacing = _floor_root(total, n, d)

    if d == 1:
        if n > 1:
            spacing = min(spacing, (m - 1) // (n - 1))
        bosons = [(i * spacing,) for i in range(n)]
        ordinary = [(x,) for x in range(m)]
        ancillas = [(x,) for x in range(m, m + n)]
        L = _half_min_spacing(bosons, side / 2.0)
        spec = _assemble(d, n, beta, c1, side, ordinary, bosons, ancillas, L)
        logger.debug("lattice.built", d=d, n=n, m=m, side=side, L=spec.L)
        return spec

    per_axis = _ceil_root(n, d)
    room = side - 1 - (per_axis - 1) * spacing
    if room < 0:
        raise ValidationError(
            f"{per_axis}^{d} boson grid at spacing {spacing} does not fit in side {side}"
        )
    offset = max(0, min((spacing - 1) // 2, room))
    grid = itertools.product(range(per_axis), repeat=d)
    bosons = [tuple(offset + k * spacing for k in cell) for cell in itertools.islice(grid, n)]

    taken: set[Coordinate] = set(bosons)
    ancillas: list[Coordinate] = []
    for boson in bosons:
        cell = _ancilla_cell(boson, taken, side)
        if cell is None:
            raise ValidationError(f"no free cell left for the ancilla of boson at {boson}")
        taken.add(cell)
        ancillas.append(cell)

    free = (c for c in itertools.product(range(side), repeat=d) if c not in taken)
    ordinary = list(bosons) + list(itertools.islice(free, m - n))
    if len(ordinary) != m:
        raise ValidationError(f"side {side} box cannot hold {m} sites plus {n} ancillas")

    L = _half_min_spacing(bosons, side / 2.0)
    spec = _assemble(d, n, beta, c1, side, ordinary, bosons, ancillas, L)
    logger.debug("lattice.built", d=d, n=n, m=m, side=side, L=spec.L)
    return spec


def chain_lattice(m: int, occupied: Sequence[int]) -> LatticeSpec:
    """Open chain of m sites with bosons on the given sites and no ancillas.

    ``beta`` is recorded as 1 and ``c1`` as m/n so that m = c1·n^beta.
    """
    if m < 1:
        raise ValidationError(f"chain needs at least one site, got m={m}")
    sites = sorted(int(s) for s in occupied)
    if not sites:
        raise ValidationError("chain needs at least one boson")
    if len(set(sites)) != len(sites) or sites[0] < 0 or sites[-1] >= m:
        raise ValidationError(f"occupied sites {sites} must be distinct and inside 0..{m - 1}")
    n = len(sites)
    bosons = [(s,) for s in sites]
    L = _half_min_spacing(bosons, m / 2.0)
    return _assemble(1, n, 1.0, m / n, m, [(x,) for x in range(m)], bosons, [], L)


def box_lattice(shape: Sequence[int], occupied: Sequence[Coordinate]) -> LatticeSpec:
    """Full rectangular box with bosons on the given coordinates and no ancillas."""
    shape = tuple(int(s) for s in shape)
    d = len(shape)
    if d not in SUPPORTED_DIMENSIONS or min(shape) < 1:
        raise ValidationError(f"unsupported box shape {shape}")
    bosons = [tuple(int(x) for x in c) for c in occupied]
    if not bosons:
        raise ValidationError("box needs at least one boson")
    for c in bosons:
        if len(c) != d or any(not 0 <= x < s for x, s in zip(c, shape)):
            raise ValidationError(f"boson coordinate {c} outside box {shape}")
    if len(set(bosons)) != len(bosons):
        raise ValidationError("boson coordinates must be distinct")
    side = max(shape)
    cells = list(itertools.product(*(range(s) for s in shape)))
    n = len(bosons)
    L = _half_min_spacing(bosons, side / 2.0)
    return _assemble(d, n, 1.0, len(cells) / n, side, cells, bosons, [], L)


def separation_chain(
    n: int,
    separation: int,
    padding: int = 0,
    m: Optional[int] = None,
) -> LatticeSpec:
    """Chain with n bosons ``separation`` sites apart, centred.

    Without ``m`` the chain is just long enough for the bosons plus
    ``padding`` empty sites on each side.
    """
    if n < 1 or separation < 1:
        raise ValidationError(f"need n >= 1 and separation >= 1, got n={n}, separation={separation}")
    span = (n - 1) * separation + 1
    if m is None:
        m = span + 2 * padding
    if span > m:
        raise ValidationError(f"{n} bosons at separation {separation} need {span} sites, chain has {m}")
    start = (m - span) // 2
    return chain_lattice(m, [start + i * separation for i in range(n)])


def min_spacing(spec: LatticeSpec) -> float:
    """L: half the minimum pairwise boson distance (side/2 for a single boson)."""
    return spec.L


def site_distance(spec: LatticeSpec, i: int, j: int) -> float:
    for idx in (i, j):
        if not 0 <= idx < spec.m:
            raise ValidationError(f"site index {idx} outside 0..{spec.m - 1}")
    return float(spec.distances[i, j])


def boson_sites(spec: LatticeSpec) -> tuple[int, ...]:
    return spec.occupied


def initial_configuration(spec: LatticeSpec) -> Configuration:
    return Configuration.from_sites(spec.m, boson_sites(spec))


def neighbors(spec: LatticeSpec, i: int) -> list[int]:
    if not 0 <= i < spec.m:
        raise ValidationError(f"site index {i} outside 0..{spec.m - 1}")
    return [int(j) for j in np.flatnonzero(spec.adjacency[i])]


def adjacency_pairs(spec: LatticeSpec) -> list[tuple[int, int]]:
    """Adjacent ordinary-site pairs (i, j) with i < j."""
    rows, cols = np.nonzero(np.triu(spec.adjacency, k=1))
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


def _boustrophedon(dims: Sequence[int]) -> list[Coordinate]:
    if len(dims) == 1:
        return [(x,) for x in range(dims[0])]
    inner = _boustrophedon(dims[1:])
    path: list[Coordinate] = []
    for x in range(dims[0]):
        sweep = inner if x % 2 == 0 else inner[::-1]
        path.extend((x,) + c for c in sweep)
    return path


def _path_is_viable(head: int, visited: list[bool], free: list[int], neighbours: list[list[int]]) -> bool:
    """Can a path from ``head`` still cover every unvisited site?

    At most one unvisited site may have fewer than two usable bonds (the far
    end), and the unvisited sites must all be reachable from ``head``.
    """
    remaining = [v for v in range(len(visited)) if not visited[v]]
    if not remaining:
        return True
    loose = 0
    for v in remaining:
        usable = free[v] + (head in neighbours[v])
        if usable == 0:
            return False
        if usable == 1:
            loose += 1
            if loose > 1:
                return False
    seen = {head}
    stack = [head]
    while stack:
        v = stack.pop()
        for u in neighbours[v]:
            if not visited[u] and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(remaining) + 1


def _path_from(start: int, neighbours: list[list[int]], budget: int) -> tuple[Optional[list[int]], int]:
    """Depth-first search from ``start``; returns the path (or None) and the steps spent."""
    m = len(neighbours)
    visited = [False] * m
    free = [len(nb) for nb in neighbours]

    def visit(v: int) -> None:
        visited[v] = True
        for u in neighbours[v]:
            free[u] -= 1

    def leave(v: int) -> None:
        visited[v] = False
        for u in neighbours[v]:
            free[u] += 1

    def options(v: int) -> list[int]:
        # popped from the end, so the fewest onward bonds go last
        return sorted((u for u in neighbours[v] if not visited[u]), key=lambda u: (free[u], u), reverse=True)

    visit(start)
    path = [start]
    stack = [options(start)]
    steps = 0
    while stack:
        if len(path) == m:
            return path, steps
        if not stack[-1]:
            stack.pop()
            leave(path.pop())
            continue
        nxt = stack[-1].pop()
        steps += 1
        if steps > budget:
            return None, steps
        visit(nxt)
        if not _path_is_viable(nxt, visited, free, neighbours):
            leave(nxt)
            continue
        path.append(nxt)
        stack.append(options(nxt))
    return None, steps


def _hamiltonian_path(neighbours: list[list[int]], budget: int) -> Optional[list[int]]:
    """Path through every site, tried from the dead ends or the least connected sites."""
    m = len(neighbours)
    degree = [len(nb) for nb in neighbours]
    if m == 1:
        return [0]
    if min(degree) == 0:
        return None
    ends = [v for v in range(m) if degree[v] == 1]
    if len(ends) > 2:
        return None
    for start in ends or sorted(range(m), key=lambda v: (degree[v], v)):
        path, spent = _path_from(start, neighbours, budget)
        if path is not None:
            return path
        budget -= spent
        if budget <= 0:
            return None
    return None


def snake_path(spec: LatticeSpec, budget: int = PATH_SEARCH_BUDGET) -> list[int]:
    """Site indices along a path whose every step is a lattice bond.

    Full boxes use the boustrophedon order. When holes left by ancillas break
    it, a depth-first search over the bonds routes around them. Raises
    :class:`ValidationError` when no such path exists or the search gives up
    after ``budget`` steps.
    """
    extent = spec.positions.max(axis=0) + 1
    path = [spec.index_of[c] for c in _boustrophedon(tuple(int(x) for x in extent)) if c in spec.index_of]
    if all(spec.adjacency[a, b] for a, b in zip(path, path[1:])):
        return path

    neighbours = [[int(j) for j in np.flatnonzero(row)] for row in spec.adjacency]
    found = _hamiltonian_path(neighbours, budget)
    if found is None:
        raise ValidationError(f"no nearest-neighbour path through the {spec.m} lattice sites")
    logger.debug("lattice.path_search", m=spec.m, holes=len(spec.ancilla_coords))
    return found


__all__ = [
    "adjacency_pairs",
    "boson_sites",
    "box_lattice",
    "build_lattice",
    "chain_lattice",
    "initial_configuration",
    "min_spacing",
    "neighbors",
    "separation_chain",
    "site_distance",
    "snake_path",
]
