"""State vectors, effect vectors and transfer matrices over fiducial index spaces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from ..circuit.model import NULL_SYSTEM, SystemType
from ..errors import AssignmentError, ShapeError

SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class FragmentLabel:
    """The triple (fragment, setting, outcome set) naming a transfer matrix.

    ``outcomes`` holds one token for a fine-grained outcome, or the merged
    outcome set after coarse-graining.
    """

    fragment: str
    setting: str
    outcomes: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.fragment}[{self.setting}]={'|'.join(self.outcomes)}"


Label = Union[FragmentLabel, str]


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """A K_out x K_in real matrix taking states of one system to another.

    Columns (null input) are states, rows (null output) are effects.
    """

    input_system: SystemType
    output_system: SystemType
    entries: np.ndarray
    label: Label = SYNTHETIC

    def __post_init__(self) -> None:
        entries = _readonly(self.entries)
        if entries.ndim != 2:
            raise ShapeError(f"Transfer matrix needs 2 dimensions, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def is_state(self) -> bool:
        return self.input_system.is_null

    @property
    def is_effect(self) -> bool:
        return self.output_system.is_null

    def as_state(self) -> "StateVector":
        if not self.is_state:
            raise ShapeError("Only a matrix with null input is a state")
        return StateVector(self.output_system, self.entries[:, 0])

    def as_effect(self) -> "EffectVector":
        if not self.is_effect:
            raise ShapeError("Only a matrix with null output is an effect")
        return EffectVector(self.input_system, self.entries[0, :])

    def relabel(self, label: Label) -> "TransferMatrix":
        return TransferMatrix(self.input_system, self.output_system, self.entries, label)

    def allclose(self, other: "TransferMatrix", tol: float = 1e-10) -> bool:
        return (
            self.input_system == other.input_system
            and self.output_system == other.output_system
            and self.shape == other.shape
            and bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=tol))
        )

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        from .composition import sequential_compose

        return sequential_compose(self, other)

    def __repr__(self) -> str:
        return (
            f"TransferMatrix({self.output_system} <- {self.input_system}, "
            f"shape={self.shape}, label={self.label})"
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Joint probabilities p^beta for each fiducial effect beta of the system."""

    system: SystemType
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _readonly(self.entries)
        if entries.ndim != 1:
            raise ShapeError(f"State vector must be 1-D, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def as_transfer(self, label: Label = SYNTHETIC) -> TransferMatrix:
        return TransferMatrix(NULL_SYSTEM, self.system, self.entries[:, None], label)

    def allclose(self, other: "StateVector", tol: float = 1e-10) -> bool:
        return self.system == other.system and bool(
            np.allclose(self.entries, other.entries, rtol=0.0, atol=tol)
        )

    def __repr__(self) -> str:
        return f"StateVector({self.system}, {np.array2string(self.entries, precision=6)})"


@dataclass(frozen=True, eq=False)
class EffectVector:
    """Row vector r with r . p the probability of the effect on state p."""

    system: SystemType
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _readonly(self.entries)
        if entries.ndim != 1:
            raise ShapeError(f"Effect vector must be 1-D, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def as_transfer(self, label: Label = SYNTHETIC) -> TransferMatrix:
        return TransferMatrix(self.system, NULL_SYSTEM, self.entries[None, :], label)

    def __matmul__(self, state: StateVector) -> float:
        if self.system != state.system:
            raise ShapeError(f"Effect on {self.system} applied to state of {state.system}")
        return float(self.entries @ state.entries)

    def __repr__(self) -> str:
        return f"EffectVector({self.system}, {np.array2string(self.entries, precision=6)})"


Outcome = Union[str, frozenset]
OutcomeAssignment = Mapping[str, Outcome]


def parse_assignment(text: str) -> dict[str, Outcome]:
    """Parse ``op=tok,op2=tok|tok`` into an assignment.

    A ``|``-separated value names a merged outcome set.

    Raises:
        AssignmentError: On a malformed item or a repeated operation.
    """
    assignment: dict[str, Outcome] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        op_id, sep, value = item.partition("=")
        op_id, value = op_id.strip(), value.strip()
        if not sep or not op_id or not value:
            raise AssignmentError(f"Outcome item {item!r} is not of the form op=token")
        if op_id in assignment:
            raise AssignmentError(f"Operation {op_id} is assigned twice")
        tokens = [t.strip() for t in value.split("|")]
        if any(not t for t in tokens):
            raise AssignmentError(f"Outcome item {item!r} has an empty token")
        assignment[op_id] = frozenset(tokens) if len(tokens) > 1 else tokens[0]
    return assignment


def format_outcome(outcome: Outcome) -> str:
    if isinstance(outcome, frozenset):
        return "|".join(sorted(outcome))
    return str(outcome)
