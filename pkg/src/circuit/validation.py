"""Structural validation of circuits."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

import networkx as nx

from ..errors import CircuitError
from .model import INPUT, OUTPUT, Circuit, PortRef

DUPLICATE_ID = "duplicate-id"
PORT_INDEX = "port-index"
EMPTY_OUTCOMES = "empty-outcomes"
UNKNOWN_REFERENCE = "unknown-reference"
TYPE_MISMATCH = "type-mismatch"
PORT_DOUBLE_USE = "port-double-use"
CLOSED_PORT_WIRED = "closed-port-wired"
CYCLE = "cycle"


@dataclass(frozen=True)
class Violation:
    """One structural problem.

    Attributes:
        kind: Violation kind (one of the module constants).
        message: Human-readable description.
        witness: Ids involved; for a cycle, the wire ids along it.
    """

    kind: str
    message: str
    witness: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    """Violations found in a circuit; the circuit is valid iff there are none."""

    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]


def validate(circuit: Circuit) -> ValidationReport:
    """Check a circuit for structural violations.

    Reports type mismatches on wires, directed cycles (with one witness),
    ports used by more than one wire, wires on closed ports, references to
    unknown operations or ports, duplicate ids, non-contiguous port indices
    and empty outcome spaces. Never raises.

    Args:
        circuit: Arbitrary graph data.

    Returns:
        ValidationReport, empty when the circuit is valid.
    """
    violations: list[Violation] = []

    for kind, ids in (("operation", circuit.op_ids), ("wire", circuit.wire_ids)):
        for ident, count in sorted(Counter(ids).items()):
            if count > 1:
                violations.append(
                    Violation(DUPLICATE_ID, f"{kind} id {ident!r} used {count} times", (ident,))
                )

    for op in circuit.operations:
        for direction, ports in ((INPUT, op.inputs), (OUTPUT, op.outputs)):
            if [p.index for p in ports] != list(range(len(ports))):
                violations.append(
                    Violation(
                        PORT_INDEX,
                        f"{op.id}: {direction} port indices are not contiguous from 0",
                        (op.id,),
                    )
                )
        if not op.outcomes:
            violations.append(Violation(EMPTY_OUTCOMES, f"{op.id} has no outcomes", (op.id,)))

    uses: Counter = Counter()
    for wire in circuit.wires:
        for direction, ref in ((OUTPUT, wire.source), (INPUT, wire.target)):
            if ref is None:
                continue
            port = _lookup(circuit, ref, direction)
            if port is None:
                violations.append(
                    Violation(
                        UNKNOWN_REFERENCE,
                        f"wire {wire.id} refers to missing port {ref.op}.{direction}{ref.index}",
                        (wire.id,),
                    )
                )
                continue
            uses[(ref.op, direction, ref.index)] += 1
            if port.closed:
                violations.append(
                    Violation(
                        CLOSED_PORT_WIRED,
                        f"wire {wire.id} is attached to closed port {ref.op}.{direction}{ref.index}",
                        (wire.id,),
                    )
                )
        mismatched = [
            f"{ref.op}.{direction}{ref.index}={port.wire_type}"
            for direction, ref in ((OUTPUT, wire.source), (INPUT, wire.target))
            if ref is not None
            for port in [_lookup(circuit, ref, direction)]
            if port is not None and port.wire_type != wire.wire_type
        ]
        if mismatched:
            violations.append(
                Violation(
                    TYPE_MISMATCH,
                    f"wire {wire.id} of type {wire.wire_type} meets {', '.join(mismatched)}",
                    (wire.id,),
                )
            )

    for (op_id, direction, index), count in sorted(uses.items()):
        if count > 1:
            violations.append(
                Violation(
                    PORT_DOUBLE_USE,
                    f"port {op_id}.{direction}{index} carries {count} wires",
                    (op_id,),
                )
            )

    try:
        cycle = nx.find_cycle(circuit.graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        witness = tuple(str(edge[2]) for edge in cycle)
        violations.append(
            Violation(CYCLE, "directed cycle through wires " + " -> ".join(witness), witness)
        )

    return ValidationReport(tuple(violations))


def require_valid(circuit: Circuit, closed: bool = True) -> None:
    """Raise CircuitError unless the circuit is valid (and closed, if asked)."""
    report = validate(circuit)
    if not report.valid:
        summary = "; ".join(v.message for v in report.violations[:3])
        raise CircuitError(f"Invalid circuit: {summary}")
    if closed and not circuit.is_closed:
        raise CircuitError("Circuit is not closed: it has open ports or boundary wires")


def _lookup(circuit: Circuit, ref: PortRef, direction: str):
    op = circuit.op_by_id.get(ref.op)
    if op is None:
        return None
    ports = op.inputs if direction == INPUT else op.outputs
    if 0 <= ref.index < len(ports):
        return ports[ref.index]
    return None
