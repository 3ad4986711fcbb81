"""Circuit probabilities as ordered products of layer matrices.

Each layer matrix is the tensor product of its operations' Z matrices and
identities for pass-through wires, framed by permutation matrices that
align the canonical (sorted) hypersurface order with the layer's factor
order.
"""
from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator, Optional, Sequence

import numpy as np

from ..circuit.foliation import (
    complete_foliation,
    fragment_layers,
    is_synchronous,
    layer_decomposition,
)
from ..circuit.model import Circuit, Foliation, GateSpec, Layer, OperationNode, SystemType
from ..circuit.validation import require_valid
from ..errors import AssignmentError, FragmentError, GateError, ProbabilityRangeError
from ..utils.config import PROBABILITY_TOLERANCE
from .composition import alignment_permutation, coarse_grain
from .vectors import FragmentLabel, Outcome, OutcomeAssignment, TransferMatrix

if TYPE_CHECKING:
    from ..theories.base import Theory

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1024)
def _gate_matrices(
    theory: "Theory", spec: GateSpec, inputs: SystemType, outputs: SystemType
) -> tuple[TransferMatrix, ...]:
    return tuple(theory.gate(spec, inputs, outputs))


def _all_outputs(op: OperationNode) -> SystemType:
    return SystemType(tuple(p.wire_type for p in op.outputs))


def _close_outputs(theory: "Theory", op: OperationNode, z: TransferMatrix) -> TransferMatrix:
    """Trace out the closed output ports of ``op``."""
    closed = [p.index for p in op.outputs if p.closed]
    if not closed:
        return z
    opened = [p.index for p in op.outputs if not p.closed]
    reorder = theory.permutation_matrix(_all_outputs(op), opened + closed)
    closed_system = SystemType(tuple(op.outputs[i].wire_type for i in closed))
    reducer = np.kron(
        np.eye(theory.K(op.output_system)), theory.trace_effect(closed_system).entries[None, :]
    )
    return TransferMatrix(z.input_system, op.output_system, reducer @ reorder.entries @ z.entries, z.label)


def _outcome_of(op: OperationNode, assignment: OutcomeAssignment) -> Outcome:
    if op.id in assignment:
        outcome = assignment[op.id]
    elif len(op.outcomes) == 1:
        outcome = op.outcomes[0]
    else:
        raise AssignmentError(f"No outcome assigned to operation {op.id}")
    tokens = outcome if isinstance(outcome, frozenset) else {outcome}
    unknown = sorted(set(tokens) - set(op.outcomes))
    if unknown or not tokens:
        raise AssignmentError(
            f"Operation {op.id} has outcomes {list(op.outcomes)}; got {sorted(tokens)}"
        )
    return outcome


def operation_transfer_matrix(
    op: OperationNode, outcome: Outcome, theory: "Theory"
) -> TransferMatrix:
    """Z matrix of one operation for an outcome (or merged outcome set).

    The gate is built for the open inputs and all outputs; closed outputs
    are traced out.

    Raises:
        GateError: If the gate's outcome count differs from the operation's.
        AssignmentError: If the outcome is not one of the operation's.
    """
    gates = _gate_matrices(theory, op.setting, op.input_system, _all_outputs(op))
    if len(gates) != len(op.outcomes):
        raise GateError(
            f"Operation {op.id}: gate {op.setting} has {len(gates)} outcome(s), "
            f"operation declares {len(op.outcomes)}"
        )
    outcome = _outcome_of(op, {op.id: outcome})
    tokens = sorted(outcome) if isinstance(outcome, frozenset) else [outcome]
    picked = [gates[op.outcomes.index(t)] for t in tokens]
    z = coarse_grain(picked)
    z = _close_outputs(theory, op, z)
    return z.relabel(FragmentLabel(op.id, str(op.setting), tuple(tokens)))


def _types(circuit: Circuit, wires: Sequence[str]) -> SystemType:
    return SystemType(tuple(circuit.wire(w).wire_type for w in wires))


def layer_matrix(
    circuit: Circuit, layer: Layer, assignment: OutcomeAssignment, theory: "Theory"
) -> np.ndarray:
    """K(target) x K(source) matrix of one layer, in canonical wire order."""
    core = np.eye(1)
    for op_id in layer.operations:
        op = circuit.operation(op_id)
        z = operation_transfer_matrix(op, _outcome_of(op, assignment), theory)
        core = np.kron(core, z.entries)
    core = np.kron(core, np.eye(theory.K(_types(circuit, layer.passthrough))))

    align_in = theory.permutation_matrix(
        _types(circuit, layer.source), alignment_permutation(layer.source, layer.in_order)
    )
    align_out = theory.permutation_matrix(
        _types(circuit, layer.out_order), alignment_permutation(layer.out_order, layer.target)
    )
    logger.debug(
        "layer %s %s: %s x %s", layer.kind, ",".join(layer.operations), core.shape[0], core.shape[1]
    )
    return align_out.entries @ core @ align_in.entries


def _product(
    circuit: Circuit, layers: Sequence[Layer], assignment: OutcomeAssignment, theory: "Theory"
) -> np.ndarray:
    result = None
    for layer in layers:
        matrix = layer_matrix(circuit, layer, assignment, theory)
        result = matrix if result is None else matrix @ result
    return np.eye(1) if result is None else result


def _check_assignment(circuit: Circuit, assignment: OutcomeAssignment) -> None:
    unknown = sorted(set(assignment) - set(circuit.op_ids))
    if unknown:
        raise AssignmentError(f"Assignment names unknown operation(s): {', '.join(unknown)}")
    for op in circuit.operations:
        _outcome_of(op, assignment)


def fragment_transfer_matrix(
    circuit: Circuit,
    inputs: Sequence[str],
    outputs: Sequence[str],
    assignment: OutcomeAssignment,
    theory: "Theory",
) -> TransferMatrix:
    """Z matrix of a circuit fragment between its boundary wires.

    Args:
        circuit: Fragment whose open wire ends are its inputs and outputs.
        inputs: Input wires (no source) in the order the matrix should use.
        outputs: Output wires (no target) in the order the matrix should use.
        assignment: Outcome for each operation of the fragment.
        theory: Locally tomographic theory.

    Raises:
        FragmentError: If a port list is not synchronous or does not match
            the fragment boundary.
        AssignmentError: If the assignment is incomplete.
    """
    theory.require_local_tomography()
    inputs, outputs = list(inputs), list(outputs)
    for name, wires, boundary in (
        ("input", inputs, circuit.boundary_inputs),
        ("output", outputs, circuit.boundary_outputs),
    ):
        if len(set(wires)) != len(wires) or set(wires) != set(boundary):
            raise FragmentError(
                f"Fragment {name} wires {wires} do not match its boundary {sorted(boundary)}"
            )
        if not is_synchronous(circuit, wires):
            raise FragmentError(f"Fragment {name} wires {wires} are not synchronous")
    _check_assignment(circuit, assignment)

    layers = fragment_layers(circuit)
    body = _product(circuit, layers, assignment, theory)
    sorted_in, sorted_out = sorted(inputs), sorted(outputs)
    enter = theory.permutation_matrix(_types(circuit, inputs), alignment_permutation(inputs, sorted_in))
    leave = theory.permutation_matrix(
        _types(circuit, sorted_out), alignment_permutation(sorted_out, outputs)
    )
    entries = leave.entries @ body @ enter.entries
    return TransferMatrix(_types(circuit, inputs), _types(circuit, outputs), entries)


def evaluate_layers(
    circuit: Circuit, layers: Sequence[Layer], assignment: OutcomeAssignment, theory: "Theory"
) -> float:
    """Probability from a precomputed layer decomposition (no range check)."""
    return float(_product(circuit, layers, assignment, theory)[0, 0])


def evaluate_circuit(
    circuit: Circuit,
    assignment: OutcomeAssignment,
    theory: "Theory",
    foliation: Optional[Foliation] = None,
    tol: float = PROBABILITY_TOLERANCE,
) -> float:
    """Probability of a setting-outcome specified closed circuit.

    Args:
        circuit: Valid, closed circuit.
        assignment: Outcome per operation; single-outcome operations may be
            omitted, and a frozenset value merges outcomes.
        theory: Locally tomographic theory.
        foliation: Complete foliation to evaluate along; defaults to
            :func:`complete_foliation`.
        tol: Allowed excursion outside [0, 1].

    Returns:
        The probability.

    Raises:
        ProbabilityRangeError: If the result is outside [-tol, 1 + tol].
    """
    require_valid(circuit)
    theory.require_local_tomography()
    _check_assignment(circuit, assignment)
    if foliation is None:
        foliation = complete_foliation(circuit)
    layers = layer_decomposition(circuit, foliation)
    value = evaluate_layers(circuit, layers, assignment, theory)
    if not -tol <= value <= 1 + tol:
        raise ProbabilityRangeError(value, tol)
    return value


def outcome_assignments(circuit: Circuit) -> Iterator[dict[str, str]]:
    """Every fine-grained assignment, operations in id order, outcomes in declared order."""
    ops = circuit.operations
    for combo in itertools.product(*(op.outcomes for op in ops)):
        yield {op.id: token for op, token in zip(ops, combo)}


def coarse_assignment(circuit: Circuit) -> dict[str, frozenset[str]]:
    """The assignment ignoring every outcome."""
    return {op.id: frozenset(op.outcomes) for op in circuit.operations}


def evaluate_all(
    circuit: Circuit,
    theory: "Theory",
    foliation: Optional[Foliation] = None,
    tol: float = PROBABILITY_TOLERANCE,
) -> list[tuple[dict[str, str], float]]:
    """Probability of every fine-grained outcome assignment."""
    require_valid(circuit)
    theory.require_local_tomography()
    if foliation is None:
        foliation = complete_foliation(circuit)
    layers = layer_decomposition(circuit, foliation)
    results = []
    for assignment in outcome_assignments(circuit):
        value = evaluate_layers(circuit, layers, assignment, theory)
        if not -tol <= value <= 1 + tol:
            raise ProbabilityRangeError(value, tol)
        results.append((assignment, value))
    return results
