"""Seeded random circuits for the property checks.

Circuits are grown from preparations: each step either prepares new
wires, applies a gate to one or two open wires or measures them away,
until the operation limit is reached; remaining wires are then closed
off with effects. Gate contents are drawn by a theory-specific chooser.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..circuit.builder import CircuitBuilder
from ..circuit.model import OUTPUT, Circuit, GateSpec
from ..dsl.document import CircuitDocument
from ..theories import ClassicalTheory, QuantumTheory, Theory
from ..theories.quantum import random_density_matrix, random_unitary

QUBIT = "q"


@dataclass(frozen=True)
class OperationShape:
    """Port types of an operation about to be generated.

    ``outputs`` includes closed ports, listed in ``closed_outputs``.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    closed_outputs: tuple[int, ...] = ()


GateChooser = Callable[[np.random.Generator, OperationShape], tuple[GateSpec, int]]


@dataclass
class GeneratedCircuit:
    circuit: Circuit
    theory: Theory

    def to_document(self, outcomes: Optional[dict] = None) -> CircuitDocument:
        return CircuitDocument.from_circuit(self.circuit, self.theory.name, self.theory.types, outcomes)


@dataclass
class _Slot:
    op: str
    index: int
    wire_type: str


def _effects_needed(open_wires: int) -> int:
    return -(-open_wires // 2)


def random_closed_circuit(
    rng: np.random.Generator,
    labels: list[str],
    choose_gate: GateChooser,
    max_ops: int = 6,
    max_open: int = 4,
    closed_rate: float = 0.15,
) -> Circuit:
    """Grow a random closed circuit.

    Args:
        rng: Random generator.
        labels: Wire-type labels to draw port types from.
        choose_gate: Picks a gate and its outcome count for a shape.
        max_ops: Most operations to generate (at least 2).
        max_open: Most wires open at any moment.
        closed_rate: Chance that a gate gets an extra closed output.
    """
    op_limit = int(rng.integers(2, max(2, max_ops) + 1))
    builder = CircuitBuilder()
    pending: list[_Slot] = []
    counter = {"op": 0, "wire": 0}

    def pick_types(count: int) -> list[str]:
        return [labels[int(i)] for i in rng.integers(0, len(labels), size=count)]

    def take(count: int) -> list[_Slot]:
        chosen = sorted(rng.choice(len(pending), size=count, replace=False).tolist(), reverse=True)
        taken = [pending.pop(i) for i in chosen]
        rng.shuffle(taken)
        return taken

    def add(kind: str, consumed: list[_Slot], out_types: list[str], closed: tuple[int, ...] = ()) -> None:
        counter["op"] += 1
        op_id = f"{kind}{counter['op']}"
        shape = OperationShape(tuple(s.wire_type for s in consumed), tuple(out_types), closed)
        gate, outcomes = choose_gate(rng, shape)
        builder.add_operation(op_id, shape.inputs, shape.outputs, gate, outcomes=outcomes)
        for index in closed:
            builder.close(op_id, OUTPUT, index)
        for j, slot in enumerate(consumed):
            counter["wire"] += 1
            builder.connect(f"w{counter['wire']}", (slot.op, slot.index), (op_id, j))
        pending.extend(_Slot(op_id, i, t) for i, t in enumerate(out_types) if i not in closed)

    add("P", [], pick_types(int(rng.integers(1, min(2, max_open) + 1))))
    for _ in range(4 * op_limit):
        if counter["op"] + _effects_needed(len(pending)) >= op_limit:
            break
        action = rng.choice(["prepare", "gate", "measure"])
        if action == "prepare":
            count = int(rng.integers(1, 3))
            grown = len(pending) + count
            if grown > max_open or counter["op"] + 1 + _effects_needed(grown) > op_limit:
                continue
            add("P", [], pick_types(count))
        elif action == "gate" and pending:
            arity = int(rng.integers(1, min(2, len(pending)) + 1))
            count = arity if rng.random() < 0.5 else int(rng.integers(1, 3))
            grown = len(pending) - arity + count
            if grown > max_open or counter["op"] + 1 + _effects_needed(grown) > op_limit:
                continue
            consumed = take(arity)
            out_types = [s.wire_type for s in consumed] if count == arity else pick_types(count)
            closed: tuple[int, ...] = ()
            if rng.random() < closed_rate:
                out_types.append(pick_types(1)[0])
                closed = (len(out_types) - 1,)
            add("G", consumed, out_types, closed)
        elif action == "measure" and len(pending) > 1:
            add("E", take(int(rng.integers(1, 3))), [])
    while pending:
        add("E", take(min(2, len(pending))), [])
    return builder.build()


def random_substochastic_split(
    rng: np.random.Generator, k_out: int, k_in: int, outcomes: int, norm_one: bool = False
) -> list[np.ndarray]:
    """Nonnegative matrices whose sum is (sub)stochastic column by column."""
    columns = rng.dirichlet(np.ones(k_out), size=k_in).T
    if not norm_one:
        columns = columns * rng.uniform(0.2, 1.0, size=k_in)
    split = rng.dirichlet(np.ones(outcomes), size=(k_out, k_in))
    return [columns * split[..., j] for j in range(outcomes)]


def classical_gate_chooser(theory: ClassicalTheory, norm_one: bool = False) -> GateChooser:
    """Random ``matrix`` gates with one to three outcomes."""

    def choose(rng: np.random.Generator, shape: OperationShape) -> tuple[GateSpec, int]:
        outcomes = int(rng.integers(1, 4 if not shape.outputs else 3))
        matrices = random_substochastic_split(
            rng, theory.K(shape.outputs), theory.K(shape.inputs), outcomes, norm_one
        )
        return GateSpec("matrix", tuple(m.tolist() for m in matrices)), outcomes

    return choose


def complex_json(array: np.ndarray) -> list:
    """Nested lists with each entry written as ``[re, im]``."""
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


def random_povm(rng: np.random.Generator, dim: int, count: int) -> list[np.ndarray]:
    """A random ``count``-element POVM on C^dim."""
    parts = [random_density_matrix(dim, rng) for _ in range(count)]
    eigenvalues, vectors = np.linalg.eigh(sum(parts))
    inv_sqrt = vectors @ np.diag(eigenvalues**-0.5) @ vectors.conj().T
    elements = [inv_sqrt @ p @ inv_sqrt for p in parts]
    return [(e + e.conj().T) / 2 for e in elements]


def random_instrument(
    rng: np.random.Generator, d_in: int, d_out: int, outcomes: int, norm_one: bool = False
) -> list[list[np.ndarray]]:
    """Kraus operators per outcome, cut from one random isometry."""
    per_outcome = max(1, -(-d_in // d_out))
    rows = d_out * per_outcome * outcomes
    isometry = random_unitary(rows, rng)[:, :d_in]
    if not norm_one:
        isometry = isometry * np.sqrt(rng.uniform(0.3, 1.0))
    blocks = isometry.reshape(outcomes, per_outcome, d_out, d_in)
    return [[blocks[j, k] for k in range(per_outcome)] for j in range(outcomes)]


def quantum_gate_chooser(theory: QuantumTheory, norm_one: bool = False) -> GateChooser:
    """Library gates where the ports fit, random instruments otherwise."""

    def instrument(rng: np.random.Generator, shape: OperationShape) -> tuple[GateSpec, int]:
        outcomes = int(rng.integers(1, 3))
        kraus = random_instrument(
            rng, theory.hilbert_dim(shape.inputs), theory.hilbert_dim(shape.outputs), outcomes, norm_one
        )
        args = tuple([complex_json(k) for k in outcome] for outcome in kraus)
        return GateSpec("kraus", args), outcomes

    def choose(rng: np.random.Generator, shape: OperationShape) -> tuple[GateSpec, int]:
        if shape.closed_outputs or rng.random() < 0.25:
            return instrument(rng, shape)
        d_in, d_out = theory.hilbert_dim(shape.inputs), theory.hilbert_dim(shape.outputs)
        scale = 1.0 if norm_one else float(rng.uniform(0.3, 1.0))
        if not shape.inputs:
            if rng.random() < 0.5:
                ket = rng.normal(size=d_out) + 1j * rng.normal(size=d_out)
                ket *= np.sqrt(scale) / np.linalg.norm(ket)
                return GateSpec("prep_ket", (complex_json(ket),)), 1
            rank = int(rng.integers(1, d_out + 1))
            rho = scale * random_density_matrix(d_out, rng, rank)
            return GateSpec("prep_density", (complex_json(rho),)), 1
        if not shape.outputs:
            pick = rng.random()
            if pick < 0.4:
                return GateSpec("measure_z"), d_in
            if pick < 0.55 and norm_one:
                return GateSpec("trace"), 1
            count = int(rng.integers(1, 4))
            elements = [scale * e for e in random_povm(rng, d_in, count)]
            return GateSpec("povm", tuple(complex_json(e) for e in elements)), count
        if shape.inputs == shape.outputs:
            names = ["depolarize", "measure_z"]
            if len(shape.inputs) == 1:
                names += ["h", "x", "z"]
            if len(shape.inputs) == 2:
                names.append("cnot")
            name = str(rng.choice(names))
            if name == "depolarize":
                return GateSpec(name, (float(rng.uniform(0, 1)),)), 1
            return GateSpec(name), d_in if name == "measure_z" else 1
        return instrument(rng, shape)

    return choose


def random_classical_circuit(
    rng: np.random.Generator,
    theory: Optional[ClassicalTheory] = None,
    max_ops: int = 6,
    max_n: int = 4,
    norm_one: bool = False,
) -> GeneratedCircuit:
    """Random closed classical circuit over one or two types with N <= max_n."""
    if theory is None:
        theory = ClassicalTheory({"a": int(rng.integers(2, max_n + 1)), "b": int(rng.integers(2, max_n + 1))})
    circuit = random_closed_circuit(
        rng, sorted(theory.types), classical_gate_chooser(theory, norm_one), max_ops=max_ops
    )
    return GeneratedCircuit(circuit, theory)


def random_quantum_circuit(
    rng: np.random.Generator,
    theory: Optional[QuantumTheory] = None,
    max_ops: int = 6,
    max_qubits: int = 4,
    norm_one: bool = False,
) -> GeneratedCircuit:
    """Random closed qubit circuit with at most ``max_qubits`` wires open at once."""
    theory = theory or QuantumTheory({QUBIT: 2})
    circuit = random_closed_circuit(
        rng,
        [QUBIT],
        quantum_gate_chooser(theory, norm_one),
        max_ops=max_ops,
        max_open=max_qubits,
        closed_rate=0.1,
    )
    return GeneratedCircuit(circuit, theory)


def random_circuit(rng: np.random.Generator, theory_name: str, **kwargs) -> GeneratedCircuit:
    if theory_name == ClassicalTheory.name:
        return random_classical_circuit(rng, **kwargs)
    return random_quantum_circuit(rng, **kwargs)


def random_disjoint_pair(
    rng: np.random.Generator, theory_name: str, max_ops: int = 4
) -> tuple[GeneratedCircuit, GeneratedCircuit]:
    """Two circuits over the same theory instance."""
    first = random_circuit(rng, theory_name, max_ops=max_ops)
    second = random_circuit(rng, theory_name, theory=first.theory, max_ops=max_ops)
    return first, second


def random_document(rng: np.random.Generator) -> CircuitDocument:
    """A random circuit document, sometimes with default outcomes."""
    theory_name = ClassicalTheory.name if rng.random() < 0.5 else QuantumTheory.name
    generated = random_circuit(rng, theory_name, max_ops=5)
    outcomes = {}
    for op in generated.circuit.operations:
        if len(op.outcomes) > 1 and rng.random() < 0.5:
            if rng.random() < 0.3:
                outcomes[op.id] = frozenset(op.outcomes[:2])
            else:
                outcomes[op.id] = op.outcomes[int(rng.integers(len(op.outcomes)))]
    return generated.to_document(outcomes)
