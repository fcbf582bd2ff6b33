"""Shared fixtures for the bosonlab test suite."""

from __future__ import annotations

import math
import os
from typing import Callable, Optional

import numpy as np
import pytest

from bosonlab.core.dynamics import beamsplitter_schedule, evolve
from bosonlab.core.lattice import adjacency_pairs, chain_lattice
from bosonlab.core.models import Configuration, HoppingSchedule, LatticeSpec, Propagator, Segment
from bosonlab.utils.config import get_config


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch):
    """Keep user overrides out of the tests and reload settings per test."""
    for key in list(os.environ):
        if key.startswith("BOSONLAB"):
            monkeypatch.delenv(key, raising=False)
    get_config.cache_clear()
    yield
    get_config.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def hom_schedule() -> HoppingSchedule:
    return beamsplitter_schedule(0, 1, 2)


@pytest.fixture
def hom_propagator(hom_schedule) -> Propagator:
    return evolve(hom_schedule)


@pytest.fixture
def hom_input() -> Configuration:
    return Configuration((1, 1))


@pytest.fixture
def two_site_chain() -> LatticeSpec:
    return chain_lattice(2, [0, 1])


ScheduleFactory = Callable[..., HoppingSchedule]


@pytest.fixture
def make_schedule() -> ScheduleFactory:
    """Random nearest-neighbour schedules with |J_ij| <= 1 and real diagonals up to 3."""

    def build(m: int, segments: int, rng: np.random.Generator, spec: Optional[LatticeSpec] = None) -> HoppingSchedule:
        pairs = adjacency_pairs(spec) if spec is not None else [(i, i + 1) for i in range(m - 1)]
        out = []
        for _ in range(segments):
            J = np.zeros((m, m), dtype=np.complex128)
            for i, j in pairs:
                J[i, j] = rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * math.pi))
                J[j, i] = np.conj(J[i, j])
            J[np.diag_indices(m)] = rng.uniform(-3, 3, size=m)
            out.append(Segment(rng.uniform(0.05, 1.0), J))
        return HoppingSchedule(tuple(out))

    return build
