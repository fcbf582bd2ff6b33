"""Flat-file persistence."""

from bosonlab.storage.formats import (
    circuit_from_text,
    circuit_to_text,
    distribution_from_csv,
    distribution_to_csv,
    lattice_from_text,
    lattice_to_text,
    matrix_from_text,
    matrix_to_text,
    report_to_csv,
    samples_from_text,
    samples_to_text,
    schedule_from_text,
    schedule_to_text,
    table_to_csv,
)
from bosonlab.storage.results import ResultWriter

__all__ = [
    "ResultWriter",
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
