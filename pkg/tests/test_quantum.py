from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.circuit.model import GateSpec, SystemType
from src.engine.composition import sequential_compose, tensor_compose
from src.errors import GateError, InvalidTransferMatrixError
from src.theories import CPMap, QuantumTheory, composite_basis, quantum_fiducial_basis
from src.theories.quantum import HADAMARD, random_density_matrix, random_unitary

Q = SystemType.of("q")
NULL = SystemType()


def test_fiducial_basis_is_complete():
    for n in (1, 2, 3):
        basis = quantum_fiducial_basis(n)
        assert basis.size == n * n
        assert np.linalg.matrix_rank(basis.gram) == n * n


def test_trace_effect_gives_trace(qubits):
    rho = random_density_matrix(2, np.random.default_rng(0))
    state = qubits.state_from_density(0.4 * rho, "q")
    assert qubits.trace_effect("q") @ state == pytest.approx(0.4)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_embedding_round_trip(seed, n):
    theory = QuantumTheory({"d": n})
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(n, rng, rank=int(rng.integers(1, n + 1)))
    back = theory.density_from_state(theory.state_from_density(rho, "d"))
    np.testing.assert_allclose(back, rho, atol=1e-10)


def test_effect_entries_give_born_rule(qubits):
    rng = np.random.default_rng(1)
    rho = random_density_matrix(2, rng)
    effect = np.diag([0.3, 0.9])
    r = qubits.effect_from_operator(effect, "q")
    p = qubits.state_from_density(rho, "q")
    assert r @ p == pytest.approx(np.trace(effect @ rho).real)


def test_unitary_transfer_matrix_acts_like_the_channel(qubits):
    rng = np.random.default_rng(2)
    u = random_unitary(2, rng)
    z = qubits.transfer_matrix(CPMap.from_kraus([u], 2, 2), "q", "q")
    rho = random_density_matrix(2, rng)
    moved = z.entries @ qubits.state_from_density(rho, "q").entries
    np.testing.assert_allclose(moved, qubits.state_from_density(u @ rho @ u.conj().T, "q").entries, atol=1e-10)


def test_functoriality(qubits):
    rng = np.random.default_rng(4)
    first = CPMap.from_kraus([random_unitary(2, rng)], 2, 2)
    second = CPMap.from_function(lambda rho: 0.5 * rho + 0.5 * np.trace(rho) * np.eye(2) / 2, 2, 2)
    z_first = qubits.transfer_matrix(first, "q", "q")
    z_second = qubits.transfer_matrix(second, "q", "q")
    z_both = qubits.transfer_matrix(second.compose(first), "q", "q")
    assert sequential_compose(z_second, z_first).allclose(z_both, 1e-10)


def test_tensor_of_maps_matches_tensor_of_matrices(qubits):
    rng = np.random.default_rng(5)
    a = CPMap.from_kraus([random_unitary(2, rng)], 2, 2)
    b = CPMap.from_kraus([HADAMARD], 2, 2)
    joint = qubits.transfer_matrix(a.tensor(b), ("q", "q"), ("q", "q"))
    separate = tensor_compose(
        qubits.transfer_matrix(a, "q", "q"), qubits.transfer_matrix(b, "q", "q"), qubits
    )
    assert joint.allclose(separate, 1e-10)


def test_composite_basis_is_row_major_kron():
    basis = composite_basis((2, 2))
    single = quantum_fiducial_basis(2)
    np.testing.assert_allclose(basis.operators[5], np.kron(single.operators[1], single.operators[1]))


def test_validity_rejects_non_cp_maps(qubits):
    transpose = CPMap.from_function(lambda rho: rho.T, 2, 2)
    assert not transpose.validity().valid
    with pytest.raises(InvalidTransferMatrixError):
        qubits.transfer_matrix(transpose, "q", "q")
    amplifier = CPMap.from_kraus([2 * np.eye(2)], 2, 2)
    assert "trace" in str(amplifier.validity())
    overflow = CPMap(1, 2, np.array([[np.inf, 0], [0, 0]]))
    assert "non-finite" in str(overflow.validity())


def test_validate_transfer_matrix_round_trips_choi(qubits):
    z = qubits.gate(GateSpec("depolarize", (0.25,)), Q, Q)[0]
    assert qubits.validate_transfer_matrix(z).valid
    np.testing.assert_allclose(qubits.cp_map_of(z).choi, qubits.gate_maps(GateSpec("depolarize", (0.25,)), Q, Q)[0].choi, atol=1e-10)


def test_measure_z_outcomes(qubits):
    plus = qubits.state_from_density(np.full((2, 2), 0.5), "q")
    zs = qubits.gate(GateSpec("measure_z"), Q, NULL)
    assert [z.as_effect() @ plus for z in zs] == pytest.approx([0.5, 0.5])
    after = qubits.gate(GateSpec("measure_z"), Q, Q)[1].entries @ plus.entries
    np.testing.assert_allclose(qubits.basis(Q).density(after), np.diag([0.0, 0.5]), atol=1e-12)


def test_preparations_and_povm(qubits):
    ket = qubits.gate(GateSpec("prep_ket", ([[0, 0], [1, 0]],)), NULL, Q)[0]
    np.testing.assert_allclose(qubits.basis(Q).density(ket.entries[:, 0]), np.diag([0.0, 1.0]), atol=1e-12)
    density = qubits.gate(GateSpec("prep_density", ([[0.5, 0], [0, 0.5]],)), NULL, Q)[0]
    assert qubits.trace_effect(Q) @ density.as_state() == pytest.approx(1.0)
    povm = qubits.gate(GateSpec("povm", ([[0.25, 0], [0, 0.25]], [[0.75, 0], [0, 0.75]])), Q, NULL)
    assert [z.as_effect() @ density.as_state() for z in povm] == pytest.approx([0.25, 0.75])


def test_inline_matrix_gate_is_validated(qubits):
    identity = np.eye(4).tolist()
    assert qubits.gate(GateSpec("matrix", (identity,)), Q, Q)[0].shape == (4, 4)
    with pytest.raises(GateError):
        qubits.gate(GateSpec("matrix", ((-np.eye(4)).tolist(),)), Q, Q)


@pytest.mark.parametrize(
    "spec, inputs, outputs",
    [
        (GateSpec("toffoli"), Q, Q),
        (GateSpec("cnot"), Q, Q),
        (GateSpec("depolarize", (2,)), Q, Q),
        (GateSpec("prep_ket", ([2, 0],)), NULL, Q),
        (GateSpec("prep_ket", ([1, 0, 0],)), NULL, Q),
        (GateSpec("povm", ([[1, 0], [0, 1]], [[1, 0], [0, 1]])), Q, NULL),
        (GateSpec("kraus", ([[[1, 0, 0], [0, 1, 0]]],)), Q, Q),
        (GateSpec("h"), Q, NULL),
    ],
)
def test_bad_gates(qubits, spec, inputs, outputs):
    with pytest.raises(GateError):
        qubits.gate(spec, inputs, outputs)


def test_homogeneity_is_rank_one(qubits):
    pure = qubits.state_from_density(np.diag([0.0, 0.8]), "q")
    assert qubits.is_homogeneous(pure)
    assert not qubits.is_homogeneous(qubits.state_from_density(np.eye(2) / 2, "q"))
    extension = qubits.correlated_extension(qubits.state_from_density(np.diag([0.6, 0.4]), "q"))
    reduced = qubits.density_from_state(extension).reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    np.testing.assert_allclose(reduced, np.diag([0.6, 0.4]), atol=1e-10)
