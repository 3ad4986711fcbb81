"""Canonical ``.gptc`` text for a circuit document."""
from __future__ import annotations

from typing import Optional

from ..circuit.model import PortRef
from .document import CircuitDocument, OperationDecl


def _types(labels: tuple[str, ...]) -> str:
    return ",".join(labels) or "-"


def _port(ref: Optional[PortRef], direction: str) -> str:
    return "-" if ref is None else f"{ref.op}.{direction}{ref.index}"


def _operation(decl: OperationDecl) -> str:
    line = f"op {decl.id} : {_types(decl.inputs)} -> {_types(decl.outputs)} gate={decl.gate}"
    if decl.outcomes is not None:
        line += f" outcomes={decl.outcomes}"
    return line


def serialize_circuit(document: CircuitDocument) -> str:
    """Render a document as canonical text.

    Types come first, then operations and wires by id, closures and
    default outcomes. Floats are written with ``repr`` so they read back
    bit-exactly.
    """
    lines = [f"theory {document.theory}"]
    lines += [f"type {label} N={n}" for label, n in document.types]
    lines += [_operation(decl) for decl in document.operations]
    for wire in document.wires:
        line = f"wire {wire.id} {_port(wire.source, 'out')} -> {_port(wire.target, 'in')}"
        if wire.wire_type is not None:
            line += f" type={wire.wire_type}"
        lines.append(line)
    lines += [f"close {closure}" for closure in document.closed]
    lines += [f"outcome {op}={'|'.join(tokens)}" for op, tokens in document.outcomes]
    return "\n".join(lines) + "\n"
