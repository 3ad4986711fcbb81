"""JSON interchange form of circuit documents (``"schema": 1``).

    {
      "schema": 1,
      "theory": "quantum",
      "types": {"q": 2},
      "operations": [
        {"id": "P", "inputs": [], "outputs": ["q"], "gate": "prep_ket",
         "args": [[1, 0]], "outcomes": 1}
      ],
      "wires": [{"id": "w1", "source": "P.out0", "target": "M.in0"}],
      "closed": ["P.out1"],
      "outcomes": {"M": "0"}
    }

``source``/``target`` are null at a fragment boundary; a wire ``type`` is
only required when both ends are null; ``outcomes`` may be omitted from an
operation, and a default outcome may be a list of tokens (merged set).
"""
from __future__ import annotations

import json
from typing import Any, Optional

from ..circuit.model import GateSpec, PortRef
from ..errors import CircuitParseError
from .document import CircuitDocument, CloseDecl, OperationDecl, WireDecl
from .parser import PORT_RE, Diagnostic, parse_circuit
from .serializer import serialize_circuit

SCHEMA_VERSION = 1


def _port_text(ref: Optional[PortRef], direction: str) -> Optional[str]:
    return None if ref is None else f"{ref.op}.{direction}{ref.index}"


def document_to_json(document: CircuitDocument) -> dict[str, Any]:
    """Plain-JSON form of a document."""
    wires = []
    for wire in document.wires:
        entry = {
            "id": wire.id,
            "source": _port_text(wire.source, "out"),
            "target": _port_text(wire.target, "in"),
        }
        if wire.wire_type is not None:
            entry["type"] = wire.wire_type
        wires.append(entry)
    return {
        "schema": SCHEMA_VERSION,
        "theory": document.theory,
        "types": dict(document.types),
        "operations": [
            {
                "id": op.id,
                "inputs": list(op.inputs),
                "outputs": list(op.outputs),
                "gate": op.gate.name,
                "args": op.gate.json_args(),
                "outcomes": op.outcomes,
            }
            for op in document.operations
        ],
        "wires": wires,
        "closed": [str(c) for c in document.closed],
        "outcomes": {
            op: tokens[0] if len(tokens) == 1 else list(tokens) for op, tokens in document.outcomes
        },
    }


class _Reader:
    def __init__(self):
        self.diagnostics: list[Diagnostic] = []

    def fail(self, path: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(1, 1, "schema", f"{path}: {message}"))

    def expect(self, value: Any, kind: type | tuple, path: str) -> bool:
        if isinstance(value, bool) and kind is not bool or not isinstance(value, kind):
            self.fail(path, f"expected {getattr(kind, '__name__', 'value')}")
            return False
        return True

    def strings(self, value: Any, path: str) -> Optional[tuple[str, ...]]:
        if not self.expect(value, list, path):
            return None
        if not all(isinstance(v, str) for v in value):
            self.fail(path, "expected a list of strings")
            return None
        return tuple(value)

    def port(self, value: Any, direction: str, path: str) -> tuple[bool, Optional[PortRef]]:
        if value is None:
            return True, None
        match = PORT_RE.fullmatch(value) if isinstance(value, str) else None
        if not match or match.group("dir") != direction:
            self.fail(path, f"expected null or '<op>.{direction}<index>'")
            return False, None
        return True, PortRef(match.group("op"), int(match.group("index")))

    def read(self, data: Any) -> Optional[CircuitDocument]:
        if not self.expect(data, dict, "$"):
            return None
        for key in ("operations", "wires", "closed"):
            if not self.expect(data.get(key, []), list, f"$.{key}"):
                return None
        if data.get("schema") != SCHEMA_VERSION:
            self.fail("$.schema", f"expected {SCHEMA_VERSION}")
        theory = data.get("theory")
        self.expect(theory, str, "$.theory")
        types = data.get("types", {})
        if self.expect(types, dict, "$.types"):
            for label, n in types.items():
                self.expect(n, int, f"$.types.{label}")

        operations = []
        for i, op in enumerate(data.get("operations", [])):
            path = f"$.operations[{i}]"
            if not self.expect(op, dict, path):
                continue
            inputs = self.strings(op.get("inputs", []), f"{path}.inputs")
            outputs = self.strings(op.get("outputs", []), f"{path}.outputs")
            args = op.get("args", [])
            outcomes = op.get("outcomes")
            ok = self.expect(op.get("id"), str, f"{path}.id")
            ok &= self.expect(op.get("gate"), str, f"{path}.gate")
            ok &= self.expect(args, list, f"{path}.args")
            if outcomes is not None:
                ok &= self.expect(outcomes, int, f"{path}.outcomes")
            if ok and inputs is not None and outputs is not None:
                operations.append(
                    OperationDecl(op["id"], inputs, outputs, GateSpec(op["gate"], tuple(args)), outcomes)
                )

        wires = []
        for i, wire in enumerate(data.get("wires", [])):
            path = f"$.wires[{i}]"
            if not self.expect(wire, dict, path):
                continue
            ok_src, source = self.port(wire.get("source"), "out", f"{path}.source")
            ok_dst, target = self.port(wire.get("target"), "in", f"{path}.target")
            wire_type = wire.get("type")
            ok = self.expect(wire.get("id"), str, f"{path}.id") and ok_src and ok_dst
            if wire_type is not None:
                ok &= self.expect(wire_type, str, f"{path}.type")
            if ok:
                wires.append(WireDecl(wire["id"], source, target, wire_type))

        closed = []
        for i, text in enumerate(data.get("closed", [])):
            match = PORT_RE.fullmatch(text) if isinstance(text, str) else None
            if not match:
                self.fail(f"$.closed[{i}]", "expected '<op>.in<j>' or '<op>.out<i>'")
                continue
            closed.append(CloseDecl(match.group("op"), match.group("dir"), int(match.group("index"))))

        outcomes = []
        defaults = data.get("outcomes", {})
        if self.expect(defaults, dict, "$.outcomes"):
            for op_id, value in defaults.items():
                tokens = (value,) if isinstance(value, str) else value
                if not isinstance(tokens, (list, tuple)) or not tokens or not all(
                    isinstance(t, str) for t in tokens
                ):
                    self.fail(f"$.outcomes.{op_id}", "expected a token or a list of tokens")
                    continue
                outcomes.append((op_id, tuple(tokens)))

        if self.diagnostics:
            return None
        return CircuitDocument(
            theory=theory,
            types=tuple(types.items()),
            operations=tuple(operations),
            wires=tuple(wires),
            closed=tuple(set(closed)),
            outcomes=tuple(outcomes),
        )


def document_from_json(data: str | bytes | dict) -> CircuitDocument:
    """Read and check a JSON document.

    Structural problems are reported against JSON paths; the result is
    then checked exactly like ``.gptc`` text, with positions referring to
    its canonical text rendering.

    Raises:
        CircuitParseError: With positioned diagnostics.
    """
    if isinstance(data, (str, bytes, bytearray)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise CircuitParseError([Diagnostic(exc.lineno, exc.colno, "json", exc.msg)]) from None
        except (UnicodeDecodeError, RecursionError, ValueError) as exc:
            raise CircuitParseError([Diagnostic(1, 1, "json", str(exc))]) from None
    reader = _Reader()
    document = reader.read(data)
    if document is None:
        raise CircuitParseError(reader.diagnostics)
    return parse_circuit(serialize_circuit(document))
