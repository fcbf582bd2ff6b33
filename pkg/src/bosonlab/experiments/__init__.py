"""Experiment configs and grid sweeps."""

from .config import BATTERIES, ExperimentConfig, load_experiment_config, parse_experiment_config
from .sweeps import PHASE_COLUMNS, phase_diagram, run_checks

__all__ = [
    "BATTERIES",
    "PHASE_COLUMNS",
    "ExperimentConfig",
    "load_experiment_config",
    "parse_experiment_config",
    "phase_diagram",
    "run_checks",
]
