"""Line-oriented parser for ``.gptc`` circuit files.

Grammar, one declaration per line (``#`` starts a comment)::

    theory <name>
    type <label> N=<int>
    op <id> : <in-types> -> <out-types> gate=<name>[(<json args>)] [outcomes=<k>]
    wire <id> <op>.out<i> -> <op>.in<j> [type=<label>]
    close <op>.out<i> | <op>.in<j>
    outcome <op>=<token>[|<token>...]

Type lists are comma-separated, ``-`` for none; ``-`` as a wire end marks
a fragment boundary.
"""
from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from typing import Optional

from ..circuit.model import INPUT, OUTPUT, GateSpec, PortRef, SystemType
from ..circuit.validation import validate
from ..errors import CircuitParseError, GPTCircuitError, InvalidTransferMatrixError
from ..theories import Theory
from .document import CircuitDocument, CloseDecl, OperationDecl, WireDecl

logger = logging.getLogger(__name__)

MAX_DIMENSION = 64
MAX_OUTCOMES = 4096
MAX_FIDUCIALS = 256

IDENT = r"[^\W\d]\w*"
IDENT_RE = re.compile(IDENT)
PORT_RE = re.compile(rf"(?P<op>{IDENT})\.(?P<dir>in|out)(?P<index>[0-9]{{1,9}})")
OP_RE = re.compile(
    r"op\s+(?P<id>[^\s:]+)\s*:\s*(?P<ins>\S+?)\s*->\s*(?P<outs>\S+)\s+gate=(?P<gate>\S*?)(?=\(|\s|$)"
)
TYPE_RE = re.compile(r"N=(?P<n>[0-9]{1,9})")
COUNT_RE = re.compile(r"[0-9]{1,9}")


@dataclass(frozen=True)
class Diagnostic:
    """A positioned parse or validation problem (1-based line and column)."""

    line: int
    column: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message} [{self.code}]"


def _reject_constant(name: str):
    raise ValueError(f"{name} is not a finite number")


def _reject_object(pairs):
    raise ValueError("JSON objects are not gate arguments")


def _check_finite(value) -> None:
    if isinstance(value, list):
        for item in value:
            _check_finite(item)
    elif isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"{value} is not a finite number")


def parse_gate_args(inner: str) -> tuple:
    """Parse the text between a gate's parentheses as a JSON array body.

    Raises:
        ValueError: On malformed JSON, objects or non-finite numbers
            (including literals that overflow, such as ``1e400``).
    """
    try:
        values = json.loads(
            f"[{inner}]", parse_constant=_reject_constant, object_pairs_hook=_reject_object
        )
        _check_finite(values)
    except RecursionError:
        raise ValueError("gate arguments are nested too deeply") from None
    return tuple(values)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.diagnostics: list[Diagnostic] = []
        self.theory: Optional[tuple[str, int, int]] = None
        self.types: dict[str, tuple[int, int]] = {}
        self.ops: dict[str, tuple[OperationDecl, int, Optional[int], int]] = {}
        self.wires: dict[str, tuple[WireDecl, int]] = {}
        self.closed: dict[CloseDecl, tuple[int, int]] = {}
        self.outcomes: dict[str, tuple[tuple[str, ...], int, int]] = {}

    def error(self, line: int, column: int, code: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(line, max(column, 1), code, message))

    def run(self) -> CircuitDocument:
        for lineno, raw in enumerate(self.text.splitlines(), 1):
            line = raw.split("#", 1)[0].rstrip()
            stripped = line.lstrip()
            if not stripped:
                continue
            indent = len(line) - len(stripped)
            keyword = stripped.split(None, 1)[0]
            handler = getattr(self, f"_line_{keyword}", None)
            if handler is None:
                self.error(lineno, indent + 1, "unknown-directive", f"unknown directive {keyword!r}")
                continue
            handler(lineno, indent, stripped)

        if self.theory is None:
            self.error(1, 1, "theory", "missing theory declaration")
        if self.diagnostics:
            raise CircuitParseError(sorted(self.diagnostics, key=lambda d: (d.line, d.column)))

        document = self._semantics()
        if self.diagnostics:
            raise CircuitParseError(sorted(self.diagnostics, key=lambda d: (d.line, d.column)))
        return document

    def _tokens(self, indent: int, text: str) -> list[tuple[str, int]]:
        return [(m.group(), indent + m.start() + 1) for m in re.finditer(r"\S+", text)]

    def _line_theory(self, lineno: int, indent: int, text: str) -> None:
        tokens = self._tokens(indent, text)
        if len(tokens) != 2:
            self.error(lineno, indent + 1, "syntax", "expected 'theory <name>'")
        elif self.theory is not None:
            self.error(lineno, tokens[1][1], "duplicate-id", "theory declared twice")
        else:
            self.theory = (tokens[1][0], lineno, tokens[1][1])

    def _line_type(self, lineno: int, indent: int, text: str) -> None:
        tokens = self._tokens(indent, text)
        if len(tokens) != 3 or not IDENT_RE.fullmatch(tokens[1][0]):
            self.error(lineno, indent + 1, "syntax", "expected 'type <label> N=<int>'")
            return
        (label, label_col), (spec, spec_col) = tokens[1], tokens[2]
        match = TYPE_RE.fullmatch(spec)
        if not match:
            self.error(lineno, spec_col, "syntax", f"expected N=<int>, got {spec!r}")
            return
        n = int(match.group("n"))
        if not 1 <= n <= MAX_DIMENSION:
            self.error(lineno, spec_col, "type", f"N must lie in [1, {MAX_DIMENSION}], got {n}")
        elif label in self.types:
            self.error(lineno, label_col, "duplicate-id", f"type {label!r} declared twice")
        else:
            self.types[label] = (n, lineno)

    def _type_list(self, lineno: int, column: int, text: str) -> Optional[tuple[str, ...]]:
        if text == "-":
            return ()
        labels = tuple(text.split(","))
        for label in labels:
            if not IDENT_RE.fullmatch(label):
                self.error(lineno, column, "syntax", f"bad type list {text!r}")
                return None
        return labels

    def _line_op(self, lineno: int, indent: int, text: str) -> None:
        match = OP_RE.match(text)
        if not match:
            self.error(
                lineno,
                indent + 1,
                "syntax",
                "expected 'op <id> : <in-types> -> <out-types> gate=<name(args)> [outcomes=<k>]'",
            )
            return

        def col(group: str) -> int:
            return indent + match.start(group) + 1

        op_id, gate = match.group("id"), match.group("gate")
        if not IDENT_RE.fullmatch(op_id):
            self.error(lineno, col("id"), "syntax", f"bad operation id {op_id!r}")
            return
        if not IDENT_RE.fullmatch(gate):
            self.error(lineno, col("gate"), "syntax", f"bad gate name {gate!r}")
            return
        inputs = self._type_list(lineno, col("ins"), match.group("ins"))
        outputs = self._type_list(lineno, col("outs"), match.group("outs"))
        if inputs is None or outputs is None:
            return

        rest, offset = text[match.end():], match.end()
        args: tuple = ()
        if rest.startswith("("):
            depth, close = 0, None
            for i, ch in enumerate(rest):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    close = i
                    break
            if close is None:
                self.error(lineno, indent + offset + 1, "syntax", "unbalanced parentheses in gate arguments")
                return
            try:
                args = parse_gate_args(rest[1:close])
            except ValueError as exc:
                self.error(lineno, indent + offset + 2, "gate-args", f"bad gate arguments: {exc}")
                return
            offset += close + 1
            rest = rest[close + 1:]

        outcomes, outcomes_col = None, None
        for token, token_col in self._tokens(indent + offset, rest):
            key, sep, value = token.partition("=")
            if key != "outcomes" or not sep or outcomes is not None:
                self.error(lineno, token_col, "syntax", f"unexpected {token!r}")
                return
            if not COUNT_RE.fullmatch(value) or not 1 <= int(value) <= MAX_OUTCOMES:
                self.error(lineno, token_col, "syntax", f"outcomes must be an integer in [1, {MAX_OUTCOMES}]")
                return
            outcomes, outcomes_col = int(value), token_col

        if op_id in self.ops:
            self.error(lineno, col("id"), "duplicate-id", f"operation {op_id!r} declared twice")
            return
        decl = OperationDecl(op_id, inputs, outputs, GateSpec(gate, args), outcomes or 1)
        self.ops[op_id] = (decl, lineno, outcomes, outcomes_col or col("gate"))

    def _port(self, lineno: int, column: int, token: str, direction: str) -> Optional[PortRef]:
        match = PORT_RE.fullmatch(token)
        if not match or match.group("dir") != direction:
            self.error(lineno, column, "syntax", f"expected <op>.{direction}<index> or '-', got {token!r}")
            return None
        return PortRef(match.group("op"), int(match.group("index")))

    def _line_wire(self, lineno: int, indent: int, text: str) -> None:
        tokens = self._tokens(indent, text)
        if len(tokens) not in (5, 6) or tokens[3][0] != "->":
            self.error(lineno, indent + 1, "syntax", "expected 'wire <id> <op>.out<i> -> <op>.in<j>'")
            return
        (wire_id, id_col), (src, src_col), (dst, dst_col) = tokens[1], tokens[2], tokens[4]
        if not IDENT_RE.fullmatch(wire_id):
            self.error(lineno, id_col, "syntax", f"bad wire id {wire_id!r}")
            return
        source = None if src == "-" else self._port(lineno, src_col, src, OUTPUT)
        target = None if dst == "-" else self._port(lineno, dst_col, dst, INPUT)
        if (src != "-" and source is None) or (dst != "-" and target is None):
            return
        wire_type = None
        if len(tokens) == 6:
            key, sep, value = tokens[5][0].partition("=")
            if key != "type" or not sep or not IDENT_RE.fullmatch(value):
                self.error(lineno, tokens[5][1], "syntax", f"expected type=<label>, got {tokens[5][0]!r}")
                return
            wire_type = value
        if source is None and target is None and wire_type is None:
            self.error(lineno, id_col, "wire-type", f"lone wire {wire_id} needs type=<label>")
            return
        if wire_id in self.wires:
            self.error(lineno, id_col, "duplicate-id", f"wire {wire_id!r} declared twice")
            return
        self.wires[wire_id] = (WireDecl(wire_id, source, target, wire_type), lineno)

    def _line_close(self, lineno: int, indent: int, text: str) -> None:
        tokens = self._tokens(indent, text)
        if len(tokens) != 2:
            self.error(lineno, indent + 1, "syntax", "expected 'close <op>.out<i>' or 'close <op>.in<j>'")
            return
        token, column = tokens[1]
        match = PORT_RE.fullmatch(token)
        if not match:
            self.error(lineno, column, "syntax", f"bad port {token!r}")
            return
        decl = CloseDecl(match.group("op"), match.group("dir"), int(match.group("index")))
        self.closed.setdefault(decl, (lineno, column))

    def _line_outcome(self, lineno: int, indent: int, text: str) -> None:
        tokens = self._tokens(indent, text)
        if len(tokens) != 2:
            self.error(lineno, indent + 1, "syntax", "expected 'outcome <op>=<token>'")
            return
        token, column = tokens[1]
        op_id, sep, value = token.partition("=")
        values = tuple(value.split("|"))
        if not sep or not IDENT_RE.fullmatch(op_id) or not all(values):
            self.error(lineno, column, "syntax", f"bad outcome {token!r}")
            return
        if op_id in self.outcomes:
            self.error(lineno, column, "duplicate-id", f"outcome for {op_id} given twice")
            return
        self.outcomes[op_id] = (tuple(sorted(set(values))), lineno, column)

    def _build_theory(self) -> Optional[Theory]:
        name, lineno, column = self.theory
        document = CircuitDocument(name, tuple((k, n) for k, (n, _) in self.types.items()))
        try:
            return document.build_theory()
        except GPTCircuitError as exc:
            self.error(lineno, column, "theory", str(exc))
            return None

    def _semantics(self) -> Optional[CircuitDocument]:
        theory = self._build_theory()
        if theory is None:
            return None

        for decl, (lineno, column) in self.closed.items():
            entry = self.ops.get(decl.op)
            ports = () if entry is None else (entry[0].inputs if decl.direction == INPUT else entry[0].outputs)
            if not 0 <= decl.index < len(ports):
                self.error(lineno, column, "unknown-reference", f"no port {decl} to close")

        closed = set(self.closed)
        resolved = []
        for op_id, (decl, lineno, declared, col) in self.ops.items():
            unknown = sorted(set(decl.inputs + decl.outputs) - set(self.types))
            if unknown:
                self.error(lineno, 1, "unknown-type", f"operation {op_id} uses undeclared type(s) {', '.join(unknown)}")
                continue
            if decl.gate.name not in theory.gate_names:
                self.error(lineno, 1, "unknown-gate", f"theory {theory.name} has no gate {decl.gate.name!r}")
                continue
            open_inputs = SystemType(
                tuple(t for i, t in enumerate(decl.inputs) if CloseDecl(op_id, INPUT, i) not in closed)
            )
            sizes = (theory.K(open_inputs), theory.K(decl.outputs))
            if max(sizes) > MAX_FIDUCIALS:
                self.error(
                    lineno, 1, "too-large",
                    f"operation {op_id}: fiducial counts {sizes[0]} -> {sizes[1]} exceed {MAX_FIDUCIALS}",
                )
                continue
            try:
                count = len(theory.gate(decl.gate, open_inputs, SystemType(decl.outputs)))
            except InvalidTransferMatrixError as exc:
                self.error(lineno, 1, "invalid-matrix", f"operation {op_id}: {exc}")
                continue
            except (ValueError, TypeError, ArithmeticError, RecursionError) as exc:
                code = "invalid-matrix" if decl.gate.name == "matrix" else "gate-args"
                self.error(lineno, 1, code, f"operation {op_id}: {exc}")
                continue
            if declared is not None and declared != count:
                self.error(
                    lineno, col, "arity", f"operation {op_id}: gate {decl.gate.name} has {count} outcome(s), declared {declared}"
                )
                continue
            resolved.append(OperationDecl(op_id, decl.inputs, decl.outputs, decl.gate, count))
        outcome_counts = {decl.id: decl.outcomes for decl in resolved}

        for decl, lineno in self.wires.values():
            if decl.wire_type is not None and decl.wire_type not in self.types:
                self.error(lineno, 1, "unknown-type", f"wire {decl.id} has undeclared type {decl.wire_type}")

        for op_id, (tokens, lineno, column) in self.outcomes.items():
            if op_id not in self.ops:
                self.error(lineno, column, "unknown-reference", f"outcome for unknown operation {op_id}")
            elif op_id in outcome_counts:
                allowed = {str(i) for i in range(outcome_counts[op_id])}
                bad = sorted(set(tokens) - allowed)
                if bad:
                    self.error(lineno, column, "unknown-outcome", f"{op_id} has no outcome {', '.join(bad)}")

        if self.diagnostics:
            return None
        document = CircuitDocument(
            theory=theory.name,
            types=tuple((label, n) for label, (n, _) in self.types.items()),
            operations=tuple(resolved),
            wires=tuple(decl for decl, _ in self.wires.values()),
            closed=tuple(self.closed),
            outcomes=tuple((op, tokens) for op, (tokens, _, _) in self.outcomes.items()),
        )
        self._structure(document)
        return document

    def _structure(self, document: CircuitDocument) -> None:
        lines = {op_id: entry[1] for op_id, entry in self.ops.items()}
        lines.update({wire_id: entry[1] for wire_id, entry in self.wires.items()})
        for violation in validate(document.to_circuit()):
            lineno = min((lines[w] for w in violation.witness if w in lines), default=1)
            self.error(lineno, 1, violation.kind, violation.message)


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        column = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
        raise CircuitParseError(
            [Diagnostic(line, column, "encoding", f"invalid UTF-8 byte 0x{data[exc.start]:02x}")]
        ) from None


def parse_circuit(text: str | bytes) -> CircuitDocument:
    """Parse and check a circuit document.

    Args:
        text: Document text, or raw bytes decoded as UTF-8.

    Returns:
        The document in canonical order, with outcome counts resolved from
        the gates.

    Raises:
        CircuitParseError: With every positioned diagnostic found.
    """
    if isinstance(text, (bytes, bytearray)):
        text = _decode(bytes(text))
    document = _Parser(text).run()
    logger.debug("parsed %d operations, %d wires", len(document.operations), len(document.wires))
    return document
