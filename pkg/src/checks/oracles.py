"""Reference evaluators that bypass foliations and fiducial matrices.

Both take the same closed circuits and outcome assignments as
:func:`src.engine.evaluation.evaluate_circuit` and must agree with it.
"""
from __future__ import annotations

import logging

import networkx as nx
import numpy as np

from ..circuit.model import Circuit, OperationNode, SystemType
from ..circuit.validation import require_valid
from ..engine.vectors import OutcomeAssignment
from ..errors import AssignmentError, TheoryError
from ..theories import ClassicalTheory, QuantumTheory

logger = logging.getLogger(__name__)


def _all_outputs(op: OperationNode) -> SystemType:
    return SystemType(tuple(p.wire_type for p in op.outputs))


def _tokens(op: OperationNode, assignment: OutcomeAssignment) -> list[str]:
    outcome = assignment.get(op.id)
    if outcome is None:
        if len(op.outcomes) != 1:
            raise AssignmentError(f"No outcome assigned to operation {op.id}")
        return [op.outcomes[0]]
    tokens = sorted(outcome) if isinstance(outcome, frozenset) else [outcome]
    if not tokens or not set(tokens) <= set(op.outcomes):
        raise AssignmentError(f"Operation {op.id} has outcomes {list(op.outcomes)}; got {tokens}")
    return tokens


def classical_enumeration(circuit: Circuit, assignment: OutcomeAssignment, theory: ClassicalTheory) -> float:
    """Sum over every joint value of the wires of the product of matrix entries.

    Each operation contributes its substochastic matrix, reshaped to one
    axis per port; closed outputs are summed out first.
    """
    if not isinstance(theory, ClassicalTheory):
        raise TheoryError("classical_enumeration needs the classical theory")
    require_valid(circuit)
    label = {w: i for i, w in enumerate(circuit.wire_ids)}
    operands: list = []
    for op in circuit.operations:
        outputs = _all_outputs(op)
        gates = theory.gate(op.setting, op.input_system, outputs)
        matrix = sum(gates[op.outcomes.index(t)].entries for t in _tokens(op, assignment))
        tensor = np.asarray(matrix).reshape(theory.dims(outputs) + theory.dims(op.input_system))
        closed = tuple(p.index for p in op.outputs if p.closed)
        if closed:
            tensor = tensor.sum(axis=closed)
        axes = [label[w] for w in circuit.output_wires(op.id)] + [label[w] for w in circuit.input_wires(op.id)]
        operands += [tensor, axes]
    return float(np.einsum(*operands, []))


def _move_to_end(rho: np.ndarray, dims: list[int], order: list[int]) -> np.ndarray:
    n = len(dims)
    tensor = rho.reshape(dims + dims).transpose(order + [n + i for i in order])
    size = int(np.prod(dims, dtype=int))
    return tensor.reshape(size, size)


def density_matrix_simulation(
    circuit: Circuit, assignment: OutcomeAssignment, theory: QuantumTheory
) -> float:
    """Push a density matrix through the circuit in topological order.

    The state lives on the wires currently in flight. Each operation's
    inputs are moved to the end, its (summed) CP map is applied through
    the Choi matrix and its closed outputs are traced out.
    """
    if not isinstance(theory, QuantumTheory):
        raise TheoryError("density_matrix_simulation needs the quantum theory")
    require_valid(circuit)
    live: list[str] = []
    dims: list[int] = []
    rho = np.ones((1, 1), dtype=complex)
    for op_id in nx.lexicographical_topological_sort(circuit.graph):
        op = circuit.operation(op_id)
        outputs = _all_outputs(op)
        maps = theory.gate_maps(op.setting, op.input_system, outputs)
        choi = sum(maps[op.outcomes.index(t)].choi for t in _tokens(op, assignment))

        inputs = list(circuit.input_wires(op_id))
        rest = [i for i, w in enumerate(live) if w not in inputs]
        rho = _move_to_end(rho, dims, rest + [live.index(w) for w in inputs])
        d_rest = int(np.prod([dims[i] for i in rest], dtype=int))
        d_in, d_out = theory.hilbert_dim(op.input_system), theory.hilbert_dim(outputs)
        blocks = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
        state = rho.reshape(d_rest, d_in, d_rest, d_in)
        state = np.einsum("aibj,iojp->aobp", state, blocks)

        out_dims = theory.hilbert_dims(outputs)
        closed = [p.index for p in op.outputs if p.closed]
        if closed:
            opened = [p.index for p in op.outputs if not p.closed]
            full = [d_rest] + out_dims
            order = [0] + [1 + i for i in opened + closed]
            tensor = state.reshape(full + full).transpose(order + [len(full) + i for i in order])
            d_open = int(np.prod([out_dims[i] for i in opened], dtype=int))
            d_closed = int(np.prod([out_dims[i] for i in closed], dtype=int))
            tensor = tensor.reshape(d_rest, d_open, d_closed, d_rest, d_open, d_closed)
            state = np.einsum("abcdec->abde", tensor)

        produced = circuit.output_wires(op_id)
        live = [live[i] for i in rest] + list(produced)
        dims = [dims[i] for i in rest] + [theory.hilbert_dim(circuit.wire(w).wire_type) for w in produced]
        size = int(np.prod(dims, dtype=int))
        rho = state.reshape(size, size)
    return float(rho[0, 0].real)
