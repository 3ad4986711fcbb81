"""Operations on states: trace, normalization, reduction, mixtures and classification."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import TYPE_CHECKING, Sequence

import numpy as np

from ..circuit.model import SystemType
from ..errors import DegenerateStateError, MixtureError, ShapeError
from ..utils.config import PROBABILITY_TOLERANCE
from .vectors import EffectVector, StateVector

if TYPE_CHECKING:
    from ..theories.base import Theory


class StateClass(str, Enum):
    NULL = "null"
    HOMOGENEOUS_PURE = "homogeneous-pure"
    HOMOGENEOUS_SUBNORMALIZED = "homogeneous-subnormalized"
    HETEROGENEOUS = "heterogeneous"


def trace_probability(state: StateVector, theory: "Theory") -> float:
    """r^- . p, the probability that the state is prepared at all."""
    return theory.trace_effect(state.system) @ state


def normalize(
    state: StateVector, theory: "Theory", tol: float = PROBABILITY_TOLERANCE
) -> StateVector:
    """p / (r^- . p).

    Raises:
        DegenerateStateError: For the null state.
    """
    norm = trace_probability(state, theory)
    if norm <= tol:
        raise DegenerateStateError(f"Cannot normalize a state with trace probability {norm:.3g}")
    return StateVector(state.system, state.entries / norm)


def _keep_indices(system: SystemType, keep: int | Sequence[int]) -> list[int]:
    indices = [keep] if isinstance(keep, int) else list(keep)
    for i in indices:
        if not 0 <= i < len(system):
            raise ShapeError(f"Factor index {i} out of range for {system}")
    if len(set(indices)) != len(indices):
        raise ShapeError(f"Repeated factor index in {indices}")
    return indices


def marginal_matrix(
    theory: "Theory", system: SystemType, keep: int | Sequence[int]
) -> np.ndarray:
    """Matrix applying identity to kept factors and the trace effect to the rest."""
    indices = _keep_indices(system, keep)
    dropped = [i for i in range(len(system)) if i not in indices]
    reorder = theory.permutation_matrix(system, indices + dropped)
    kept_system = SystemType(tuple(system[i] for i in indices))
    dropped_system = SystemType(tuple(system[i] for i in dropped))
    trace = theory.trace_effect(dropped_system).entries[None, :]
    return np.kron(np.eye(theory.K(kept_system)), trace) @ reorder.entries


def reduced_state(
    state: StateVector, keep: int | Sequence[int], theory: "Theory"
) -> StateVector:
    """State of the kept factor(s), the others closed by the trace effect.

    Raises:
        ShapeError: If a factor index is out of range.
        NotLocallyTomographicError: For a non-locally-tomographic theory.
    """
    theory.require_local_tomography()
    indices = _keep_indices(state.system, keep)
    kept_system = SystemType(tuple(state.system[i] for i in indices))
    entries = marginal_matrix(theory, state.system, indices) @ state.entries
    return StateVector(kept_system, entries)


def mix_states(
    states: Sequence[StateVector],
    weights: Sequence[float],
    tol: float = PROBABILITY_TOLERANCE,
) -> StateVector:
    """sum_i w_i p_i.

    Raises:
        MixtureError: On a negative weight, a weight sum above 1 + tol,
            mismatched lengths or mixed systems.
    """
    if not states or len(states) != len(weights):
        raise MixtureError("Need one weight per state and at least one state")
    system = states[0].system
    if any(s.system != system for s in states):
        raise MixtureError("Cannot mix states of different systems")
    weights = np.asarray(weights, dtype=float)
    if (weights < 0).any():
        raise MixtureError(f"Negative mixture weight {weights.min():.3g}")
    if weights.sum() > 1 + tol:
        raise MixtureError(f"Mixture weights sum to {weights.sum():.6g} > 1")
    entries = np.sum([w * s.entries for w, s in zip(weights, states)], axis=0)
    return StateVector(system, entries)


def classify_state(
    state: StateVector, theory: "Theory", tol: float = PROBABILITY_TOLERANCE
) -> StateClass:
    """Null, homogeneous (pure or subnormalized) or heterogeneous.

    Raises:
        UnsupportedClassificationError: If the theory has no homogeneity predicate.
    """
    if np.allclose(state.entries, 0.0, rtol=0.0, atol=tol):
        return StateClass.NULL
    if not theory.is_homogeneous(state, tol):
        return StateClass.HETEROGENEOUS
    if trace_probability(state, theory) >= 1 - tol:
        return StateClass.HOMOGENEOUS_PURE
    return StateClass.HOMOGENEOUS_SUBNORMALIZED


def conditional_state(
    state: StateVector,
    effect: EffectVector,
    factor: int,
    theory: "Theory",
    tol: float = PROBABILITY_TOLERANCE,
) -> StateVector:
    """Normalized state of the other factors given ``effect`` on ``factor``.

    Bayes' rule on the joint probabilities the state stores.

    Raises:
        DegenerateStateError: If the effect has probability zero on the state.
    """
    theory.require_local_tomography()
    system = state.system
    (index,) = _keep_indices(system, factor)
    if effect.system != SystemType((system[index],)):
        raise ShapeError(f"Effect on {effect.system} does not act on factor {index} of {system}")
    others = [i for i in range(len(system)) if i != index]
    reorder = theory.permutation_matrix(system, [index] + others)
    rest = SystemType(tuple(system[i] for i in others))
    apply = np.kron(effect.entries[None, :], np.eye(theory.K(rest))) @ reorder.entries
    conditioned = StateVector(rest, apply @ state.entries)
    if trace_probability(conditioned, theory) <= tol:
        raise DegenerateStateError("Conditioning effect has probability zero on this state")
    return normalize(conditioned, theory, tol)


def are_parallel(p: StateVector, q: StateVector, tol: float = PROBABILITY_TOLERANCE) -> bool:
    """True iff one state is a nonnegative multiple of the other.

    The null state is parallel to every state of its system.
    """
    if p.system != q.system:
        return False
    a, b = p.entries, q.entries
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na <= tol or nb <= tol:
        return True
    return bool(np.allclose(a / na, b / nb, rtol=0.0, atol=max(tol, 1e-9)))


@dataclass(frozen=True, eq=False)
class LocalNonlocalSplit:
    """A composite state split into its product-index block and the remainder.

    Attributes:
        breve: Entries over the product of the factor fiducial sets, one axis per factor.
        tilde: The remaining entries; empty for locally tomographic theories.
    """

    breve: np.ndarray
    tilde: np.ndarray

    @property
    def is_local(self) -> bool:
        return self.tilde.size == 0


def split_local_nonlocal(state: StateVector, theory: "Theory") -> LocalNonlocalSplit:
    """Split a state over the factor fiducial product and the rest.

    Raises:
        ShapeError: If the state is shorter than the product of its factor counts.
    """
    dims = theory.dims(state.system)
    product = prod(dims)
    if len(state) < product:
        raise ShapeError(f"State of length {len(state)} is shorter than the product {product}")
    breve = state.entries[:product].reshape(dims or [1])
    return LocalNonlocalSplit(breve, state.entries[product:])
