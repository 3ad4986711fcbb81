from __future__ import annotations

import numpy as np
import pytest

from src.circuit.model import SystemType
from src.engine.states import (
    StateClass,
    are_parallel,
    classify_state,
    conditional_state,
    mix_states,
    normalize,
    reduced_state,
    split_local_nonlocal,
    trace_probability,
)
from src.engine.vectors import EffectVector, StateVector
from src.errors import DegenerateStateError, MixtureError, ShapeError
from src.theories import ClassicalTheory

AB = SystemType.of("a", "b")


@pytest.fixture
def theory() -> ClassicalTheory:
    return ClassicalTheory({"a": 2, "b": 3})


def test_trace_and_normalize(theory):
    state = StateVector(SystemType.of("b"), [0.1, 0.2, 0.2])
    assert trace_probability(state, theory) == pytest.approx(0.5)
    np.testing.assert_allclose(normalize(state, theory).entries, [0.2, 0.4, 0.4])
    with pytest.raises(DegenerateStateError):
        normalize(StateVector(SystemType.of("b"), np.zeros(3)), theory)


def test_reduced_state(theory):
    joint = StateVector(AB, np.kron([0.25, 0.75], [0.5, 0.5, 0.0]))
    np.testing.assert_allclose(reduced_state(joint, 0, theory).entries, [0.25, 0.75])
    np.testing.assert_allclose(reduced_state(joint, [1], theory).entries, [0.5, 0.5, 0.0])
    swapped = reduced_state(joint, [1, 0], theory)
    assert swapped.system == SystemType.of("b", "a")
    with pytest.raises(ShapeError):
        reduced_state(joint, 2, theory)


def test_mixtures():
    system = SystemType.of("a")
    p, q = StateVector(system, [1.0, 0.0]), StateVector(system, [0.0, 1.0])
    np.testing.assert_allclose(mix_states([p, q], [0.25, 0.5]).entries, [0.25, 0.5])
    with pytest.raises(MixtureError):
        mix_states([p, q], [0.7, 0.7])
    with pytest.raises(MixtureError):
        mix_states([p, q], [-0.1, 0.5])
    with pytest.raises(MixtureError):
        mix_states([p], [0.5, 0.5])


def test_classification(theory):
    system = SystemType.of("b")
    assert classify_state(StateVector(system, np.zeros(3)), theory) is StateClass.NULL
    assert classify_state(StateVector(system, [0, 1, 0]), theory) is StateClass.HOMOGENEOUS_PURE
    assert classify_state(StateVector(system, [0, 0.4, 0]), theory) is StateClass.HOMOGENEOUS_SUBNORMALIZED
    assert classify_state(StateVector(system, [0.5, 0.5, 0]), theory) is StateClass.HETEROGENEOUS


def test_quantum_classification(qubits):
    pure = qubits.state_from_density(np.array([[0.5, 0.5], [0.5, 0.5]]), "q")
    mixed = qubits.state_from_density(np.eye(2) / 2, "q")
    assert classify_state(pure, qubits) is StateClass.HOMOGENEOUS_PURE
    assert classify_state(mixed, qubits) is StateClass.HETEROGENEOUS


def test_conditional_state_is_bayes(theory):
    joint = np.array([[0.1, 0.2, 0.1], [0.3, 0.0, 0.3]])
    state = StateVector(AB, joint.reshape(-1))
    second = conditional_state(state, EffectVector(SystemType.of("a"), [0.0, 1.0]), 0, theory)
    assert second.system == SystemType.of("b")
    np.testing.assert_allclose(second.entries, [0.5, 0.0, 0.5])
    first = conditional_state(state, EffectVector(SystemType.of("b"), [0.0, 1.0, 0.0]), 1, theory)
    np.testing.assert_allclose(first.entries, [1.0, 0.0])
    with pytest.raises(DegenerateStateError):
        conditional_state(
            StateVector(AB, np.kron([1.0, 0.0], [1.0, 0.0, 0.0])),
            EffectVector(SystemType.of("a"), [0.0, 1.0]),
            0,
            theory,
        )


def test_parallel_states():
    system = SystemType.of("b")
    p = StateVector(system, [0.2, 0.3, 0.5])
    assert are_parallel(p, StateVector(system, [0.1, 0.15, 0.25]))
    assert not are_parallel(p, StateVector(system, [0.5, 0.3, 0.2]))
    assert are_parallel(p, StateVector(system, np.zeros(3)))
    assert not are_parallel(p, StateVector(SystemType.of("c"), [0.2, 0.3, 0.5]))


def test_local_nonlocal_split(theory):
    state = StateVector(AB, np.arange(6) / 15)
    split = split_local_nonlocal(state, theory)
    assert split.is_local
    assert split.breve.shape == (2, 3)
    assert split.breve[1, 2] == pytest.approx(5 / 15)

    padded = StateVector(AB, np.concatenate([np.arange(6) / 15, [0.5, 0.25]]))
    split = split_local_nonlocal(padded, theory)
    assert not split.is_local
    np.testing.assert_allclose(split.tilde, [0.5, 0.25])
    with pytest.raises(ShapeError):
        split_local_nonlocal(StateVector(AB, np.zeros(4)), theory)
