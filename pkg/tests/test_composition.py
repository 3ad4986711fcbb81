from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.circuit.model import SystemType
from src.engine.composition import (
    alignment_permutation,
    coarse_grain,
    sequential_compose,
    tensor_all,
    tensor_compose,
    wire_permutation_matrix,
)
from src.engine.vectors import FragmentLabel, StateVector, TransferMatrix
from src.errors import ShapeError
from src.theories import ClassicalTheory

A, B = SystemType.of("a"), SystemType.of("b")


def stochastic(rows: int, cols: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).dirichlet(np.ones(rows), size=cols).T


def test_tensor_product_orders_factors():
    z = tensor_compose(TransferMatrix(A, A, np.eye(2)), TransferMatrix(B, B, 2 * np.eye(3)))
    assert z.input_system == SystemType.of("a", "b")
    assert z.shape == (6, 6)
    np.testing.assert_allclose(z.entries, np.kron(np.eye(2), 2 * np.eye(3)))


def test_empty_tensor_product_is_scalar_one():
    z = tensor_all([])
    assert z.shape == (1, 1) and z.entries[0, 0] == 1.0


def test_sequential_compose_checks_systems():
    first = TransferMatrix(A, B, stochastic(3, 2, 0))
    second = TransferMatrix(B, A, stochastic(2, 3, 1))
    both = sequential_compose(second, first)
    assert both.input_system == A and both.output_system == A
    np.testing.assert_allclose(both.entries, second.entries @ first.entries)
    with pytest.raises(ShapeError):
        sequential_compose(first, first)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parallel_maps_commute(seed):
    rng = np.random.default_rng(seed)
    z_c = TransferMatrix(A, A, rng.dirichlet(np.ones(2), size=2).T)
    z_d = TransferMatrix(B, B, rng.dirichlet(np.ones(3), size=3).T)
    i_a = TransferMatrix(A, A, np.eye(2))
    i_b = TransferMatrix(B, B, np.eye(3))
    one_way = sequential_compose(tensor_compose(z_c, i_b), tensor_compose(i_a, z_d))
    other_way = sequential_compose(tensor_compose(i_a, z_d), tensor_compose(z_c, i_b))
    assert one_way.allclose(other_way, 1e-12)
    assert one_way.allclose(tensor_compose(z_c, z_d), 1e-12)


def test_wire_permutation_swaps_factors():
    theory = ClassicalTheory({"a": 2, "b": 3})
    swap = wire_permutation_matrix(theory, SystemType.of("a", "b"), [1, 0])
    assert swap.output_system == SystemType.of("b", "a")
    p, q = np.array([0.3, 0.7]), np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(swap.entries @ np.kron(p, q), np.kron(q, p))
    with pytest.raises(ShapeError):
        wire_permutation_matrix(theory, SystemType.of("a", "b"), [0])


def test_alignment_permutation():
    assert alignment_permutation(["x", "y", "z"], ["z", "x", "y"]) == [2, 0, 1]
    with pytest.raises(ShapeError):
        alignment_permutation(["x"], ["y"])


def test_coarse_grain_sums_and_merges_labels():
    z0 = TransferMatrix(A, SystemType(), [[1.0, 0.0]], FragmentLabel("M", "readout", ("0",)))
    z1 = TransferMatrix(A, SystemType(), [[0.0, 1.0]], FragmentLabel("M", "readout", ("1",)))
    merged = coarse_grain([z0, z1])
    np.testing.assert_allclose(merged.entries, [[1.0, 1.0]])
    assert merged.label == FragmentLabel("M", "readout", ("0", "1"))
    assert coarse_grain([z0]) is z0
    with pytest.raises(ShapeError):
        coarse_grain([])
    with pytest.raises(ShapeError):
        coarse_grain([z0, TransferMatrix(B, SystemType(), [[1.0, 0.0, 0.0]])])


def test_state_through_tensor_product():
    theory = ClassicalTheory({"a": 2, "b": 3})
    joint = StateVector(SystemType.of("a", "b"), np.kron([0.5, 0.5], [1.0, 0.0, 0.0]))
    flip = tensor_compose(theory.identity("a"), TransferMatrix(B, B, np.roll(np.eye(3), 1, axis=0)), theory)
    moved = flip @ joint.as_transfer()
    np.testing.assert_allclose(moved.entries[:, 0], np.kron([0.5, 0.5], [0.0, 1.0, 0.0]))
