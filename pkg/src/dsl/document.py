"""Parsed circuit documents and their conversion to circuits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..circuit.model import INPUT, OUTPUT, Circuit, GateSpec, OperationNode, Port, PortRef, Wire
from ..engine.vectors import Outcome
from ..theories import Theory, load_theory

UNKNOWN_TYPE = "?"


@dataclass(frozen=True)
class OperationDecl:
    """``op <id> : <in-types> -> <out-types> gate=<name(args)> outcomes=<k>``."""

    id: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gate: GateSpec
    outcomes: Optional[int] = 1


@dataclass(frozen=True)
class WireDecl:
    """``wire <id> <op>.out<i> -> <op>.in<j>``; a None end is a fragment boundary.

    ``wire_type`` is only needed when both ends are open.
    """

    id: str
    source: Optional[PortRef]
    target: Optional[PortRef]
    wire_type: Optional[str] = None


@dataclass(frozen=True)
class CloseDecl:
    """``close <op>.out<i>`` or ``close <op>.in<j>``."""

    op: str
    direction: str
    index: int

    def __str__(self) -> str:
        return f"{self.op}.{self.direction}{self.index}"


@dataclass(frozen=True)
class CircuitDocument:
    """Everything a ``.gptc`` file declares, in canonical order.

    Types are sorted by label, operations and wires by id, closures by
    port and default outcomes by operation, so equality is structural.
    """

    theory: str
    types: tuple[tuple[str, int], ...] = ()
    operations: tuple[OperationDecl, ...] = ()
    wires: tuple[WireDecl, ...] = ()
    closed: tuple[CloseDecl, ...] = ()
    outcomes: tuple[tuple[str, tuple[str, ...]], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "types", tuple(sorted(self.types)))
        object.__setattr__(self, "operations", tuple(sorted(self.operations, key=lambda o: o.id)))
        object.__setattr__(self, "wires", tuple(sorted(self.wires, key=lambda w: w.id)))
        object.__setattr__(
            self, "closed", tuple(sorted(self.closed, key=lambda c: (c.op, c.direction, c.index)))
        )
        object.__setattr__(
            self,
            "outcomes",
            tuple(sorted((op, tuple(sorted(tokens))) for op, tokens in self.outcomes)),
        )

    @property
    def type_map(self) -> dict[str, int]:
        return dict(self.types)

    def build_theory(self) -> Theory:
        """Instantiate the declared theory with the declared types.

        Raises:
            TheoryError: Unknown theory or invalid type declaration.
        """
        return load_theory(self.theory, self.type_map)

    def to_circuit(self) -> Circuit:
        """Assemble the circuit graph (no validation)."""
        closed = {(c.op, c.direction, c.index) for c in self.closed}
        ops = []
        for decl in self.operations:
            inputs = tuple(
                Port(i, t, (decl.id, INPUT, i) in closed) for i, t in enumerate(decl.inputs)
            )
            outputs = tuple(
                Port(i, t, (decl.id, OUTPUT, i) in closed) for i, t in enumerate(decl.outputs)
            )
            tokens = tuple(str(i) for i in range(decl.outcomes or 1))
            ops.append(OperationNode(decl.id, inputs, outputs, decl.gate, tokens))
        by_id = {decl.id: decl for decl in self.operations}

        def port_type(ref: Optional[PortRef], direction: str) -> Optional[str]:
            decl = by_id.get(ref.op) if ref is not None else None
            if decl is None:
                return None
            ports = decl.inputs if direction == INPUT else decl.outputs
            return ports[ref.index] if 0 <= ref.index < len(ports) else None

        wires = []
        for decl in self.wires:
            wire_type = (
                decl.wire_type
                or port_type(decl.source, OUTPUT)
                or port_type(decl.target, INPUT)
                or UNKNOWN_TYPE
            )
            wires.append(Wire(decl.id, wire_type, decl.source, decl.target))
        return Circuit(tuple(ops), tuple(wires))

    def default_assignment(self) -> dict[str, Outcome]:
        """The ``outcome`` lines as an assignment."""
        return {
            op: frozenset(tokens) if len(tokens) > 1 else tokens[0]
            for op, tokens in self.outcomes
        }

    @classmethod
    def from_circuit(
        cls,
        circuit: Circuit,
        theory: str,
        types: dict[str, int],
        outcomes: dict[str, Outcome] | None = None,
    ) -> "CircuitDocument":
        """Describe an existing circuit; outcome tokens must be ``"0".."k-1"``."""
        operations = tuple(
            OperationDecl(
                op.id,
                tuple(p.wire_type for p in op.inputs),
                tuple(p.wire_type for p in op.outputs),
                op.setting,
                len(op.outcomes),
            )
            for op in circuit.operations
        )
        wires = tuple(
            WireDecl(
                w.id,
                w.source,
                w.target,
                w.wire_type if w.source is None and w.target is None else None,
            )
            for w in circuit.wires
        )
        closed = tuple(
            CloseDecl(op.id, direction, port.index)
            for op in circuit.operations
            for direction, ports in ((INPUT, op.inputs), (OUTPUT, op.outputs))
            for port in ports
            if port.closed
        )
        defaults = tuple(
            (op_id, tuple(sorted(v)) if isinstance(v, frozenset) else (v,))
            for op_id, v in (outcomes or {}).items()
        )
        return cls(theory, tuple(types.items()), operations, wires, closed, defaults)
