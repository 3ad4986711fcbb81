"""Randomized property checks and reference oracles."""
from __future__ import annotations

from .generators import (
    GeneratedCircuit,
    random_circuit,
    random_classical_circuit,
    random_disjoint_pair,
    random_document,
    random_quantum_circuit,
)
from .oracles import classical_enumeration, density_matrix_simulation
from .suites import SUITE_NAMES, SUITES, run_check, run_suite

__all__ = [
    "SUITES",
    "SUITE_NAMES",
    "GeneratedCircuit",
    "classical_enumeration",
    "density_matrix_simulation",
    "random_circuit",
    "random_classical_circuit",
    "random_disjoint_pair",
    "random_document",
    "random_quantum_circuit",
    "run_check",
    "run_suite",
]
