from __future__ import annotations

import numpy as np
import pytest

from src.engine.compression import compress_to_fiducials
from src.errors import ProbabilityRangeError, ShapeError
from src.theories.quantum import random_density_matrix, random_unitary


def test_classical_table_has_rank_n():
    rng = np.random.default_rng(7)
    states = rng.dirichlet(np.ones(3), size=12).T
    effects = np.vstack([np.eye(3), rng.uniform(0, 1, size=(9, 3))])
    table = effects @ states
    result = compress_to_fiducials(table)
    assert result.rank == 3
    np.testing.assert_allclose(result.predict(table[list(result.fiducial_rows)]), table, atol=1e-10)


def test_qubit_table_has_rank_four_and_predicts_new_states():
    rng = np.random.default_rng(11)
    effects = []
    for _ in range(10):
        u = random_unitary(2, rng)
        effects.append(u @ np.diag(rng.uniform(0, 1, size=2)) @ u.conj().T)
    states = [random_density_matrix(2, rng) for _ in range(16)]
    table = np.array([[np.trace(e @ rho).real for rho in states] for e in effects])
    result = compress_to_fiducials(table[:, :8])
    assert result.rank == 4
    held_out = table[:, 8:]
    predicted = result.predict(held_out[list(result.fiducial_rows)])
    np.testing.assert_allclose(predicted, held_out, atol=1e-8)


def test_zero_table_has_rank_zero():
    result = compress_to_fiducials(np.zeros((3, 4)))
    assert result.rank == 0
    assert result.reconstruction.shape == (3, 0)


def test_rejects_non_probabilities_and_empty_tables():
    with pytest.raises(ProbabilityRangeError):
        compress_to_fiducials(np.array([[0.5, 1.5]]))
    with pytest.raises(ProbabilityRangeError):
        compress_to_fiducials(np.array([[-0.2, 0.5]]))
    with pytest.raises(ShapeError):
        compress_to_fiducials(np.zeros((0, 2)))
