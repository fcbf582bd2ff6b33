"""bosonlab - exact and classical sampling of free bosons on lattices"""

from bosonlab.core import (
    BoundParams,
    CompiledCircuit,
    Configuration,
    HoppingSchedule,
    LatticeSpec,
    OutcomeDistribution,
    Propagator,
    build_lattice,
    clements_decompose,
    dp_distribution,
    evolve,
    exact_distribution,
    permanent,
    tvd,
)
from bosonlab.experiments import ExperimentConfig, phase_diagram, run_checks
from bosonlab.interfaces import cli_main

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "CompiledCircuit",
    "Configuration",
    "ExperimentConfig",
    "HoppingSchedule",
    "LatticeSpec",
    "OutcomeDistribution",
    "Propagator",
    "build_lattice",
    "cli_main",
    "clements_decompose",
    "dp_distribution",
    "evolve",
    "exact_distribution",
    "permanent",
    "phase_diagram",
    "run_checks",
    "tvd",
]
