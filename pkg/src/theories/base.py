"""Theory interface shared by every built-in probabilistic theory."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod
from typing import ClassVar, Mapping, Sequence

import numpy as np

from ..circuit.model import GateSpec, SystemType
from ..engine.vectors import EffectVector, StateVector, TransferMatrix
from ..errors import (
    NotLocallyTomographicError,
    ShapeError,
    TheoryError,
    UnsupportedClassificationError,
)
from ..utils.config import PROBABILITY_TOLERANCE


@dataclass
class ValidityReport:
    """Result of a theory's transformation-validity predicate.

    Attributes:
        violations: (description, magnitude) pairs; empty when valid.
    """

    violations: list[tuple[str, float]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, description: str, magnitude: float) -> None:
        self.violations.append((description, float(magnitude)))

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        return "; ".join(f"{d} (magnitude {m:.3g})" for d, m in self.violations)


def as_system(system: SystemType | str | Sequence[str]) -> SystemType:
    if isinstance(system, SystemType):
        return system
    if isinstance(system, str):
        return SystemType((system,))
    return SystemType(tuple(system))


class Theory(ABC):
    """A pluggable probabilistic theory.

    Each wire-type label maps to N, the number of distinguishable states; the
    theory turns N into the fiducial count K and supplies identity, trace
    and permutation matrices, gate constructors and the validity and
    homogeneity predicates.

    Instances are immutable after construction.
    """

    name: ClassVar[str] = "abstract"
    locally_tomographic: ClassVar[bool] = True
    gate_names: ClassVar[frozenset[str]] = frozenset()

    def __init__(self, types: Mapping[str, int]):
        """Initialize the theory.

        Args:
            types: Wire-type label -> N (distinguishable states).
        """
        checked = {}
        for label, n in types.items():
            if not isinstance(label, str) or not label:
                raise TheoryError("Wire-type labels must be non-empty strings")
            if int(n) != n or n < 1:
                raise TheoryError(f"Type {label}: N must be a positive integer, got {n!r}")
            checked[label] = int(n)
        self._types = checked

    @property
    def types(self) -> dict[str, int]:
        return dict(self._types)

    def N(self, label: str) -> int:
        try:
            return self._types[label]
        except KeyError:
            raise TheoryError(f"Type {label!r} is not declared in theory {self.name}") from None

    @abstractmethod
    def fiducial_count(self, n: int) -> int:
        """K for a single system with N = n."""

    def dims(self, system: SystemType | str | Sequence[str]) -> list[int]:
        return [self.fiducial_count(self.N(label)) for label in as_system(system)]

    def K(self, system: SystemType | str | Sequence[str]) -> int:
        """Fiducial count of a (composite) system; the product of its factors."""
        return prod(self.dims(system))

    def require_local_tomography(self) -> None:
        if not self.locally_tomographic:
            raise NotLocallyTomographicError(
                f"Theory {self.name} is not locally tomographic; K_ab != K_a K_b"
            )

    def check_shape(self, z: TransferMatrix) -> None:
        expected = (self.K(z.output_system), self.K(z.input_system))
        if z.shape != expected:
            raise ShapeError(
                f"Matrix {z.label} has shape {z.shape}; "
                f"{z.output_system} <- {z.input_system} needs {expected}"
            )

    def identity(self, system: SystemType | str | Sequence[str]) -> TransferMatrix:
        system = as_system(system)
        return TransferMatrix(system, system, np.eye(self.K(system)), "identity")

    @abstractmethod
    def factor_trace_effect(self, label: str) -> np.ndarray:
        """Trace-effect entries for a single wire type."""

    def trace_effect(self, system: SystemType | str | Sequence[str]) -> EffectVector:
        """The effect of closing every output: r^- for the system."""
        system = as_system(system)
        entries = np.ones(1)
        for label in system:
            entries = np.kron(entries, self.factor_trace_effect(label))
        return EffectVector(system, entries)

    def permutation_matrix(
        self, types: SystemType | Sequence[str], perm: Sequence[int]
    ) -> TransferMatrix:
        """0/1 matrix reordering tensor factors.

        The factor at position ``perm[i]`` of ``types`` moves to position ``i``.
        """
        system = as_system(types)
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(len(system))):
            raise ShapeError(f"{perm} is not a permutation of {len(system)} factors")
        entries = _permutation_entries(tuple(self.dims(system)), perm)
        output = SystemType(tuple(system[i] for i in perm))
        return TransferMatrix(system, output, entries, "permutation")

    @abstractmethod
    def validate_transfer_matrix(
        self, z: TransferMatrix, tol: float = PROBABILITY_TOLERANCE
    ) -> ValidityReport:
        """Check the theory's constraints on a transformation matrix."""

    def is_homogeneous(self, state: StateVector, tol: float = PROBABILITY_TOLERANCE) -> bool:
        raise UnsupportedClassificationError(
            f"Theory {self.name} has no homogeneity predicate"
        )

    def correlated_extension(self, state: StateVector) -> StateVector:
        """A bipartite state whose first factor reduces to ``state`` and which is correlated."""
        raise UnsupportedClassificationError(
            f"Theory {self.name} cannot build correlated extensions"
        )

    def extensions(self, state: StateVector, rng: np.random.Generator) -> list[StateVector]:
        """Bipartite states whose first factor reduces to ``state``."""
        raise UnsupportedClassificationError(f"Theory {self.name} cannot enumerate extensions")

    def local_effects(self, system: SystemType | str | Sequence[str]) -> list[EffectVector]:
        """A complete set of effects for the system: the fiducial effects."""
        system = as_system(system)
        k = self.K(system)
        return [EffectVector(system, row) for row in np.eye(k)]

    @abstractmethod
    def random_state(
        self, system: SystemType | str | Sequence[str], rng: np.random.Generator
    ) -> StateVector:
        """A random norm-one state."""

    @abstractmethod
    def gate(
        self, spec: GateSpec, inputs: SystemType, outputs: SystemType
    ) -> list[TransferMatrix]:
        """Transfer matrices of a gate, one per outcome in outcome order.

        Raises:
            GateError: Unknown gate, wrong port types or invalid arguments.
        """

    def __repr__(self) -> str:
        types = ", ".join(f"{k}={v}" for k, v in sorted(self._types.items()))
        return f"{type(self).__name__}({types})"


@lru_cache(maxsize=512)
def _permutation_entries(dims: tuple[int, ...], perm: tuple[int, ...]) -> np.ndarray:
    k = prod(dims)
    entries = np.eye(k).reshape(list(dims) + [k]).transpose(list(perm) + [len(dims)])
    entries = entries.reshape(k, k)
    entries.setflags(write=False)
    return entries
