"""Circuit data model: typed operations, wires, hypersurfaces and foliations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator, Optional

import networkx as nx

from ..errors import CircuitError

INPUT = "in"
OUTPUT = "out"


@dataclass(frozen=True)
class WireType:
    """A wire-type label such as ``"q2"`` or ``"bit"``.

    The theory maps each label to its distinguishability count N and
    fiducial count K.
    """

    label: str

    def __post_init__(self) -> None:
        if not isinstance(self.label, str) or not self.label:
            raise CircuitError("Wire-type labels must be non-empty strings")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SystemType:
    """Ordered wire-type labels; the empty sequence is the null system."""

    factors: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(str(f) for f in self.factors))

    def __add__(self, other: "SystemType") -> "SystemType":
        return SystemType(self.factors + other.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[str]:
        return iter(self.factors)

    def __getitem__(self, index: int) -> str:
        return self.factors[index]

    @property
    def is_null(self) -> bool:
        return not self.factors

    def __str__(self) -> str:
        return "".join(f"[{f}]" for f in self.factors) or "-"

    @classmethod
    def of(cls, *labels: str) -> "SystemType":
        return cls(tuple(labels))


NULL_SYSTEM = SystemType()


def _freeze(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass(frozen=True)
class GateSpec:
    """The setting token of an operation: a gate name plus JSON-style arguments.

    Nested lists are frozen into tuples so the spec stays hashable.
    """

    name: str
    args: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", _freeze(tuple(self.args)))

    def json_args(self) -> list:
        """Arguments as plain lists, ready for ``json.dumps``."""
        return _thaw(self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.name
        inner = json.dumps(self.json_args(), separators=(",", ":"))[1:-1]
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class Port:
    """An input or output port of an operation."""

    index: int
    wire_type: str
    closed: bool = False


@dataclass(frozen=True)
class PortRef:
    """Reference to port ``index`` of operation ``op``."""

    op: str
    index: int


@dataclass(frozen=True)
class OperationNode:
    """One use of an apparatus.

    Attributes:
        id: Operation identifier.
        inputs: Input ports, indexed from 0.
        outputs: Output ports, indexed from 0.
        setting: The knob setting (a gate specification).
        outcomes: Outcome tokens; an apparatus without readout has one.
    """

    id: str
    inputs: tuple[Port, ...] = ()
    outputs: tuple[Port, ...] = ()
    setting: GateSpec = field(default_factory=lambda: GateSpec("id"))
    outcomes: tuple[str, ...] = ("0",)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "outcomes", tuple(str(o) for o in self.outcomes))

    @property
    def open_inputs(self) -> tuple[Port, ...]:
        return tuple(p for p in self.inputs if not p.closed)

    @property
    def open_outputs(self) -> tuple[Port, ...]:
        return tuple(p for p in self.outputs if not p.closed)

    @property
    def input_system(self) -> SystemType:
        """System entering through the open input ports."""
        return SystemType(tuple(p.wire_type for p in self.open_inputs))

    @property
    def output_system(self) -> SystemType:
        """System leaving through the open output ports."""
        return SystemType(tuple(p.wire_type for p in self.open_outputs))

    @property
    def is_preparation(self) -> bool:
        return not self.open_inputs

    @property
    def is_effect(self) -> bool:
        return not self.open_outputs


@dataclass(frozen=True)
class Wire:
    """A connection from an output port to an input port.

    ``source`` is None for a fragment input and ``target`` is None for a
    fragment output; a lone wire has both ends open.
    """

    id: str
    wire_type: str
    source: Optional[PortRef] = None
    target: Optional[PortRef] = None

    @property
    def is_boundary(self) -> bool:
        return self.source is None or self.target is None


@dataclass(frozen=True)
class Circuit:
    """Operations wired together; immutable once built.

    Operations and wires are stored sorted by id. Construction never
    validates: use :func:`src.circuit.validation.validate` for that.
    """

    operations: tuple[OperationNode, ...] = ()
    wires: tuple[Wire, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "operations", tuple(sorted(self.operations, key=lambda o: o.id))
        )
        object.__setattr__(self, "wires", tuple(sorted(self.wires, key=lambda w: w.id)))

    @cached_property
    def op_by_id(self) -> dict[str, OperationNode]:
        return {op.id: op for op in self.operations}

    @cached_property
    def wire_by_id(self) -> dict[str, Wire]:
        return {w.id: w for w in self.wires}

    @property
    def op_ids(self) -> tuple[str, ...]:
        return tuple(op.id for op in self.operations)

    @property
    def wire_ids(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.wires)

    def operation(self, op_id: str) -> OperationNode:
        try:
            return self.op_by_id[op_id]
        except KeyError:
            raise CircuitError(f"Unknown operation id: {op_id}") from None

    def wire(self, wire_id: str) -> Wire:
        try:
            return self.wire_by_id[wire_id]
        except KeyError:
            raise CircuitError(f"Unknown wire id: {wire_id}") from None

    def require_wires(self, wire_ids: Iterable[str]) -> frozenset[str]:
        """Return the ids as a frozenset, raising on any unknown id."""
        ids = frozenset(wire_ids)
        unknown = sorted(ids - set(self.wire_by_id))
        if unknown:
            raise CircuitError(f"Unknown wire id(s): {', '.join(unknown)}")
        return ids

    @cached_property
    def _port_wires(self) -> dict[tuple[str, str, int], str]:
        table = {}
        for w in self.wires:
            if w.source is not None:
                table.setdefault((w.source.op, OUTPUT, w.source.index), w.id)
            if w.target is not None:
                table.setdefault((w.target.op, INPUT, w.target.index), w.id)
        return table

    def wire_at(self, op_id: str, direction: str, index: int) -> Optional[str]:
        """Id of the wire attached to a port, or None."""
        return self._port_wires.get((op_id, direction, index))

    def input_wires(self, op_id: str) -> tuple[str, ...]:
        """Wires on the open input ports of an operation, in port order."""
        op = self.operation(op_id)
        return tuple(
            w
            for w in (self.wire_at(op_id, INPUT, p.index) for p in op.open_inputs)
            if w is not None
        )

    def output_wires(self, op_id: str) -> tuple[str, ...]:
        """Wires on the open output ports of an operation, in port order."""
        op = self.operation(op_id)
        return tuple(
            w
            for w in (self.wire_at(op_id, OUTPUT, p.index) for p in op.open_outputs)
            if w is not None
        )

    def open_ports(self) -> list[tuple[str, str, int]]:
        """Open ports with no wire attached, as (op id, direction, index)."""
        dangling = []
        for op in self.operations:
            for port in op.open_inputs:
                if self.wire_at(op.id, INPUT, port.index) is None:
                    dangling.append((op.id, INPUT, port.index))
            for port in op.open_outputs:
                if self.wire_at(op.id, OUTPUT, port.index) is None:
                    dangling.append((op.id, OUTPUT, port.index))
        return dangling

    @property
    def boundary_inputs(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.wires if w.source is None)

    @property
    def boundary_outputs(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.wires if w.target is None)

    @property
    def is_closed(self) -> bool:
        """True iff no wire has an open end and every open port is wired."""
        return not self.boundary_inputs and not self.boundary_outputs and not self.open_ports()

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        """Trace-forward graph: one node per operation, one keyed edge per inner wire."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.op_by_id)
        for w in self.wires:
            if w.source is None or w.target is None:
                continue
            if w.source.op in self.op_by_id and w.target.op in self.op_by_id:
                graph.add_edge(w.source.op, w.target.op, key=w.id)
        return graph

    def disjoint_union(self, other: "Circuit") -> "Circuit":
        """Place two circuits side by side; ids must not clash."""
        clash_ops = set(self.op_by_id) & set(other.op_by_id)
        clash_wires = set(self.wire_by_id) & set(other.wire_by_id)
        if clash_ops or clash_wires:
            clashes = ", ".join(sorted(clash_ops | clash_wires))
            raise CircuitError(f"Disjoint union needs distinct ids; clashing: {clashes}")
        return Circuit(self.operations + other.operations, self.wires + other.wires)

    def relabel(self, prefix: str) -> "Circuit":
        """Copy of the circuit with every operation and wire id prefixed."""

        def ref(r: Optional[PortRef]) -> Optional[PortRef]:
            return None if r is None else PortRef(prefix + r.op, r.index)

        ops = tuple(
            OperationNode(prefix + op.id, op.inputs, op.outputs, op.setting, op.outcomes)
            for op in self.operations
        )
        wires = tuple(
            Wire(prefix + w.id, w.wire_type, ref(w.source), ref(w.target)) for w in self.wires
        )
        return Circuit(ops, wires)


@dataclass(frozen=True)
class Hypersurface:
    """A set of wire ids; equality is set equality."""

    wires: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "wires", frozenset(self.wires))

    @property
    def ordered(self) -> tuple[str, ...]:
        """Canonical (sorted) wire order."""
        return tuple(sorted(self.wires))

    def __len__(self) -> int:
        return len(self.wires)

    def __iter__(self) -> Iterator[str]:
        return iter(self.ordered)

    def __str__(self) -> str:
        return "{" + ", ".join(self.ordered) + "}"


@dataclass(frozen=True)
class Foliation:
    """Ordered hypersurfaces H_1 ... H_T."""

    hypersurfaces: tuple[Hypersurface, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "hypersurfaces",
            tuple(h if isinstance(h, Hypersurface) else Hypersurface(h) for h in self.hypersurfaces),
        )

    def __len__(self) -> int:
        return len(self.hypersurfaces)

    def __iter__(self) -> Iterator[Hypersurface]:
        return iter(self.hypersurfaces)

    def __getitem__(self, index: int) -> Hypersurface:
        return self.hypersurfaces[index]

    @property
    def wires(self) -> frozenset[str]:
        covered: set[str] = set()
        for h in self.hypersurfaces:
            covered |= h.wires
        return frozenset(covered)

    def __str__(self) -> str:
        return " -> ".join(str(h) for h in self.hypersurfaces) or "(empty)"


INITIAL = "initial"
STEP = "step"
FINAL = "final"


@dataclass(frozen=True)
class Layer:
    """Operations between two consecutive hypersurfaces.

    Attributes:
        kind: ``initial`` (before H_1), ``step`` or ``final`` (after H_T).
        operations: Member operation ids, sorted.
        passthrough: Wires present in both bounding hypersurfaces, sorted.
        source: Canonical wire order of the earlier hypersurface.
        target: Canonical wire order of the later hypersurface.
        in_order: Layer factor order on the input side (operation inputs
            in port order, then pass-through wires).
        out_order: Layer factor order on the output side.
    """

    kind: str
    operations: tuple[str, ...]
    passthrough: tuple[str, ...]
    source: tuple[str, ...]
    target: tuple[str, ...]
    in_order: tuple[str, ...]
    out_order: tuple[str, ...]
