from __future__ import annotations

import numpy as np
import pytest

from src.circuit.model import SystemType
from src.engine.vectors import (
    EffectVector,
    FragmentLabel,
    StateVector,
    TransferMatrix,
    format_outcome,
    parse_assignment,
)
from src.errors import AssignmentError, ShapeError

BIT = SystemType.of("bit")


def test_transfer_matrix_is_read_only():
    z = TransferMatrix(BIT, BIT, np.eye(2))
    with pytest.raises(ValueError):
        z.entries[0, 0] = 5.0
    with pytest.raises(ShapeError):
        TransferMatrix(BIT, BIT, np.ones(2))


def test_states_and_effects_as_matrices():
    state = StateVector(BIT, [0.25, 0.75])
    column = state.as_transfer()
    assert column.is_state and column.shape == (2, 1)
    assert column.as_state().allclose(state)

    effect = EffectVector(BIT, [0.0, 1.0])
    row = effect.as_transfer()
    assert row.is_effect and row.shape == (1, 2)
    assert effect @ state == pytest.approx(0.75)
    with pytest.raises(ShapeError):
        column.as_effect()


def test_effect_on_wrong_system():
    with pytest.raises(ShapeError):
        EffectVector(SystemType.of("trit"), [1, 0, 0]) @ StateVector(BIT, [1, 0])


def test_matmul_composes():
    flip = TransferMatrix(BIT, BIT, [[0, 1], [1, 0]])
    state = StateVector(BIT, [1.0, 0.0]).as_transfer()
    assert (flip @ state).as_state().allclose(StateVector(BIT, [0.0, 1.0]))


def test_fragment_label_text():
    assert str(FragmentLabel("M", "measure_z", ("0", "1"))) == "M[measure_z]=0|1"


def test_parse_assignment():
    assignment = parse_assignment("M1=0, M2=1|0")
    assert assignment == {"M1": "0", "M2": frozenset({"0", "1"})}
    assert format_outcome(assignment["M2"]) == "0|1"
    assert parse_assignment("") == {}


@pytest.mark.parametrize("text", ["M1", "M1=", "=0", "M1=0,M1=1", "M1=0||1"])
def test_parse_assignment_rejects(text):
    with pytest.raises(AssignmentError):
        parse_assignment(text)
