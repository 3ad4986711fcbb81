from __future__ import annotations

import numpy as np
import pytest

from src.errors import TheoryError
from src.report import Status
from src.theories import (
    CountingModel,
    composite_counting_check,
    counting_K,
    numerical_rank,
    product_state_span_rank,
)


@pytest.mark.parametrize(
    "model, n, k",
    [
        ("classical", 3, 3),
        ("quantum", 3, 9),
        ("real", 3, 6),
        ("quaternionic", 3, 15),
        ("real-quantum", 1, 1),
    ],
)
def test_counting_K(model, n, k):
    assert counting_K(model, n) == k


@pytest.mark.parametrize(
    "model, relation, status",
    [
        (CountingModel.CLASSICAL, "=", Status.PASS),
        (CountingModel.QUANTUM, "=", Status.PASS),
        (CountingModel.REAL_QUANTUM, ">", Status.PASS),
        (CountingModel.QUATERNIONIC_QUANTUM, "<", Status.FAIL),
    ],
)
def test_composite_check_for_two_n2_systems(model, relation, status):
    result = composite_counting_check(model, 2, 2)
    assert result.measured["relation"] == relation
    assert result.status is status


def test_composite_check_values():
    result = composite_counting_check("real", 2, 3)
    assert result.measured["K_a"] == 3
    assert result.measured["K_b"] == 6
    assert result.measured["K_ab"] == 21
    assert result.details == "K_ab=21 > K_aK_b=18"
    quaternionic = composite_counting_check("quaternionic", 2, 2)
    assert quaternionic.details == "K_ab=28 < K_aK_b=36, VIOLATES K_ab >= K_aK_b"


def test_counting_rejects_bad_input():
    with pytest.raises(TheoryError):
        counting_K("octonionic", 2)
    with pytest.raises(TheoryError):
        counting_K("quantum", 0)


def test_product_state_span_ranks():
    rng = np.random.default_rng(9)
    assert product_state_span_rank("classical", 2, 2, 16, rng) == 4
    assert product_state_span_rank("quantum", 2, 2, 40, rng) == 16
    assert product_state_span_rank("real", 2, 2, 30, rng) == 9
    with pytest.raises(TheoryError):
        product_state_span_rank("quaternionic", 2, 2, 100, rng)
    with pytest.raises(TheoryError):
        product_state_span_rank("quantum", 2, 2, 4, rng)


def test_numerical_rank():
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(np.outer([1, 2, 3], [1, 1])) == 1
