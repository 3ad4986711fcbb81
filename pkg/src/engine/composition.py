"""Tensor and sequential composition, factor permutations and coarse-graining."""
from __future__ import annotations

from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from ..circuit.model import SystemType
from ..errors import ShapeError
from .vectors import SYNTHETIC, FragmentLabel, Label, TransferMatrix

if TYPE_CHECKING:
    from ..theories.base import Theory


def tensor_compose(
    z1: TransferMatrix, z2: TransferMatrix, theory: Optional["Theory"] = None
) -> TransferMatrix:
    """Z_ab = Z_a (x) Z_b, factors in the order given.

    Raises:
        NotLocallyTomographicError: If ``theory`` is not locally tomographic.
    """
    if theory is not None:
        theory.require_local_tomography()
    return TransferMatrix(
        z1.input_system + z2.input_system,
        z1.output_system + z2.output_system,
        np.kron(z1.entries, z2.entries),
    )


def tensor_all(matrices: Sequence[TransferMatrix], theory: Optional["Theory"] = None) -> TransferMatrix:
    """Left-to-right tensor product; the empty product is the 1x1 identity on the null system."""
    result = TransferMatrix(SystemType(), SystemType(), np.eye(1))
    for z in matrices:
        result = tensor_compose(result, z, theory)
    return result


def sequential_compose(z2: TransferMatrix, z1: TransferMatrix) -> TransferMatrix:
    """``z2`` after ``z1``: output wires of z1 match input wires of z2.

    Raises:
        ShapeError: If the systems or shapes do not match.
    """
    if z1.output_system != z2.input_system:
        raise ShapeError(
            f"Cannot compose: {z1.output_system} output into {z2.input_system} input"
        )
    if z1.shape[0] != z2.shape[1]:
        raise ShapeError(f"Cannot compose shapes {z2.shape} and {z1.shape}")
    return TransferMatrix(z1.input_system, z2.output_system, z2.entries @ z1.entries)


def wire_permutation_matrix(
    theory: "Theory", types: SystemType | Sequence[str], perm: Sequence[int]
) -> TransferMatrix:
    """Square 0/1 matrix moving the factor at ``perm[i]`` to position ``i``.

    Raises:
        ShapeError: If ``perm`` is not a permutation of the factor positions.
    """
    if len(perm) != len(types):
        raise ShapeError(f"Permutation of length {len(perm)} for {len(types)} factors")
    return theory.permutation_matrix(types, perm)


def alignment_permutation(source: Sequence[str], target: Sequence[str]) -> list[int]:
    """Positions in ``source`` of each wire of ``target``."""
    if sorted(source) != sorted(target):
        raise ShapeError(f"Wire orders {list(source)} and {list(target)} differ as sets")
    return [list(source).index(w) for w in target]


def _merge_labels(labels: Sequence[Label]) -> Label:
    if all(isinstance(label, FragmentLabel) for label in labels):
        head = labels[0]
        if all(l.fragment == head.fragment and l.setting == head.setting for l in labels):
            merged = sorted({o for l in labels for o in l.outcomes})
            return FragmentLabel(head.fragment, head.setting, tuple(merged))
    names = [str(label) for label in labels]
    if all(name == SYNTHETIC for name in names):
        return SYNTHETIC
    return "+".join(names)


def coarse_grain(zs: Sequence[TransferMatrix]) -> TransferMatrix:
    """Entrywise sum over an outcome set; the label records the merged set.

    Raises:
        ShapeError: On an empty list or mismatched systems.
    """
    if not zs:
        raise ShapeError("Cannot coarse-grain an empty list of matrices")
    first = zs[0]
    for z in zs[1:]:
        if (z.input_system, z.output_system, z.shape) != (
            first.input_system,
            first.output_system,
            first.shape,
        ):
            raise ShapeError(f"Cannot coarse-grain {z!r} with {first!r}")
    if len(zs) == 1:
        return first
    total = np.sum([z.entries for z in zs], axis=0)
    return TransferMatrix(
        first.input_system, first.output_system, total, _merge_labels([z.label for z in zs])
    )
