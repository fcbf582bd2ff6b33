"""Physics kernel: lattices, dynamics, permanents, samplers, bounds and compilation."""

from bosonlab.core.bosonic import (
    enumerate_configurations,
    exact_distribution,
    fock_oracle_distribution,
    sample_exact,
    transition_probability,
)
from bosonlab.core.bounds import (
    lattice_tail_sum,
    lemma1_bound,
    localization_check,
    lr_envelope_check,
    path_sum_bound,
    scaled_lattice_sum,
    timescales,
    tvd,
)
from bosonlab.core.classical import dp_distribution, markov_matrix, sample_dp
from bosonlab.core.compiler import circuit_to_schedule, clements_decompose, reconstruct
from bosonlab.core.dynamics import evolve, validate_schedule
from bosonlab.core.lattice import build_lattice, initial_configuration
from bosonlab.core.models import (
    BoundParams,
    CompiledCircuit,
    Configuration,
    HoppingSchedule,
    LatticeSpec,
    MarkovMatrix,
    OutcomeDistribution,
    Propagator,
    Segment,
)
from bosonlab.core.permanent import permanent

__all__ = [
    "BoundParams",
    "CompiledCircuit",
    "Configuration",
    "HoppingSchedule",
    "LatticeSpec",
    "MarkovMatrix",
    "OutcomeDistribution",
    "Propagator",
    "Segment",
    "build_lattice",
    "circuit_to_schedule",
    "clements_decompose",
    "dp_distribution",
    "enumerate_configurations",
    "evolve",
    "exact_distribution",
    "fock_oracle_distribution",
    "initial_configuration",
    "lattice_tail_sum",
    "lemma1_bound",
    "localization_check",
    "lr_envelope_check",
    "markov_matrix",
    "path_sum_bound",
    "permanent",
    "reconstruct",
    "sample_dp",
    "sample_exact",
    "scaled_lattice_sum",
    "timescales",
    "transition_probability",
    "tvd",
    "validate_schedule",
]
