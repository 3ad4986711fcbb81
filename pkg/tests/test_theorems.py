from __future__ import annotations

import numpy as np
import pytest

from src.circuit.model import SystemType
from src.engine.theorems import (
    check_commutation,
    check_disjoint_independence,
    check_factorization,
    check_parallel_closure,
    check_uncorrelatability,
    factorization_violation,
)
from src.engine.vectors import StateVector, TransferMatrix
from src.report import Status
from src.theories import ClassicalTheory


def bell_state(qubits) -> StateVector:
    ket = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    return qubits.state_from_density(np.outer(ket, ket), ("q", "q"))


def test_product_with_pure_factor_factorizes(bits):
    joint = StateVector(SystemType.of("bit", "bit"), np.kron([0.0, 1.0], [0.3, 0.7]))
    effects = bits.local_effects("bit")
    result = check_factorization(joint, effects, effects, bits)
    assert result.status is Status.PASS
    assert result.measured["max_violation"] <= 1e-12


def test_correlated_mixed_state_is_not_applicable(bits):
    joint = StateVector(SystemType.of("bit", "bit"), [0.5, 0.0, 0.0, 0.5])
    effects = bits.local_effects("bit")
    result = check_factorization(joint, effects, effects, bits)
    assert result.status is Status.NOT_APPLICABLE
    assert result.measured["max_violation"] == pytest.approx(0.25)


def test_bell_state_violates_factorization(qubits):
    effects = qubits.local_effects("q")
    assert factorization_violation(bell_state(qubits), effects, effects, qubits) > 0.1


def test_disjoint_circuits_are_independent(simpleex, commuting_boxes, bits):
    result = check_disjoint_independence(simpleex, commuting_boxes, bits)
    assert result.status is Status.PASS
    assert result.measured["assignments"] == 16


def test_disjoint_independence_relabels_clashing_ids(simpleex, bits):
    result = check_disjoint_independence(simpleex, simpleex, bits)
    assert result.status is Status.PASS


def test_uncorrelatability(bits, qubits):
    point = StateVector(SystemType.of("bit"), [1.0, 0.0])
    assert check_uncorrelatability(point, bits).status is Status.PASS
    coin = StateVector(SystemType.of("bit"), [0.5, 0.5])
    result = check_uncorrelatability(coin, bits)
    assert result.status is Status.PASS
    assert result.measured["homogeneous"] is False
    mixed = qubits.state_from_density(np.diag([0.7, 0.3]), "q")
    assert check_uncorrelatability(mixed, qubits).status is Status.PASS


def test_parallel_closure(qubits):
    rho = np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2)
    joint = qubits.state_from_density(rho, ("q", "q"))
    assert check_parallel_closure(joint, qubits).status is Status.PASS
    assert check_parallel_closure(bell_state(qubits), qubits).status is Status.NOT_APPLICABLE


def test_commutation():
    theory = ClassicalTheory({"a": 2, "b": 3})
    rng = np.random.default_rng(3)
    z_c = TransferMatrix(SystemType.of("a"), SystemType.of("b"), rng.dirichlet(np.ones(3), size=2).T)
    z_d = TransferMatrix(SystemType.of("b"), SystemType.of("a"), rng.dirichlet(np.ones(2), size=3).T)
    result = check_commutation(z_c, z_d, theory)
    assert result.status is Status.PASS
    assert result.name == "commutation"
