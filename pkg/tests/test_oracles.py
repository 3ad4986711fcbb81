from __future__ import annotations

import numpy as np
import pytest
from conftest import BELL_TEXT
from hypothesis import given, settings
from hypothesis import strategies as st

from src.checks.generators import random_classical_circuit, random_quantum_circuit
from src.checks.oracles import classical_enumeration, density_matrix_simulation
from src.dsl import parse_circuit
from src.engine.evaluation import coarse_assignment, evaluate_circuit, outcome_assignments
from src.errors import TheoryError


def test_enumeration_on_simpleex(simpleex, bits):
    assert classical_enumeration(simpleex, {"zeta": "0"}, bits) == pytest.approx(0.185, abs=1e-12)
    assert classical_enumeration(simpleex, {"zeta": "3"}, bits) == pytest.approx(0.315, abs=1e-12)


def test_simulation_on_bell():
    document = parse_circuit(BELL_TEXT)
    circuit, theory = document.to_circuit(), document.build_theory()
    assert density_matrix_simulation(circuit, {"M1": "1", "M2": "1"}, theory) == pytest.approx(0.5)
    assert density_matrix_simulation(circuit, {"M1": "0", "M2": "1"}, theory) == pytest.approx(0.0, abs=1e-12)


def test_oracles_need_their_theory(simpleex, bits, qubits):
    with pytest.raises(TheoryError):
        classical_enumeration(simpleex, {"zeta": "0"}, qubits)
    with pytest.raises(TheoryError):
        density_matrix_simulation(simpleex, {"zeta": "0"}, bits)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_engine_matches_classical_enumeration(seed):
    rng = np.random.default_rng(seed)
    generated = random_classical_circuit(rng, max_ops=5, max_n=3)
    circuit, theory = generated.circuit, generated.theory
    for assignment in [next(outcome_assignments(circuit)), coarse_assignment(circuit)]:
        expected = classical_enumeration(circuit, assignment, theory)
        assert evaluate_circuit(circuit, assignment, theory) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_engine_matches_density_matrix_simulation(seed):
    rng = np.random.default_rng(seed)
    generated = random_quantum_circuit(rng, max_ops=5, max_qubits=3)
    circuit, theory = generated.circuit, generated.theory
    assignment = next(outcome_assignments(circuit))
    expected = density_matrix_simulation(circuit, assignment, theory)
    assert evaluate_circuit(circuit, assignment, theory) == pytest.approx(expected, abs=1e-10)


def test_norm_one_circuits_have_total_probability_one():
    rng = np.random.default_rng(11)
    for _ in range(5):
        generated = random_quantum_circuit(rng, max_ops=4, max_qubits=2, norm_one=True)
        circuit = generated.circuit
        total = density_matrix_simulation(circuit, coarse_assignment(circuit), generated.theory)
        assert total == pytest.approx(1.0, abs=1e-10)
