"""Built-in probabilistic theories."""
from __future__ import annotations

from typing import Mapping

from ..errors import TheoryError
from .base import Theory, ValidityReport, as_system
from .classical import ClassicalTheory, classical_transfer_matrix, substochastic_report
from .counting import (
    CountingModel,
    composite_counting_check,
    counting_K,
    numerical_rank,
    product_state_span_rank,
)
from .quantum import (
    CPMap,
    QuantumFiducialBasis,
    QuantumTheory,
    composite_basis,
    quantum_fiducial_basis,
    quantum_transfer_matrix,
)

THEORIES: dict[str, type[Theory]] = {
    ClassicalTheory.name: ClassicalTheory,
    QuantumTheory.name: QuantumTheory,
}


def load_theory(name: str, types: Mapping[str, int]) -> Theory:
    """Instantiate an evaluable theory by name.

    Raises:
        TheoryError: If the name is unknown.
    """
    try:
        cls = THEORIES[name]
    except KeyError:
        known = ", ".join(sorted(THEORIES))
        raise TheoryError(f"Unknown theory {name!r}; evaluable theories: {known}") from None
    return cls(types)


__all__ = [
    "THEORIES",
    "CPMap",
    "ClassicalTheory",
    "CountingModel",
    "QuantumFiducialBasis",
    "QuantumTheory",
    "Theory",
    "ValidityReport",
    "as_system",
    "classical_transfer_matrix",
    "composite_basis",
    "composite_counting_check",
    "counting_K",
    "load_theory",
    "numerical_rank",
    "product_state_span_rank",
    "quantum_fiducial_basis",
    "quantum_transfer_matrix",
    "substochastic_report",
]
