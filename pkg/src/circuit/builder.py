"""Mutable circuit builder."""
from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import CircuitError
from .model import INPUT, OUTPUT, Circuit, GateSpec, OperationNode, Port, PortRef, Wire


class CircuitBuilder:
    """Assemble a :class:`Circuit` step by step.

    Example:
        >>> c = (CircuitBuilder()
        ...      .add_operation("P", outputs=["bit"], gate="set", args=[0])
        ...      .add_operation("E", inputs=["bit"], gate="readout", outcomes=2)
        ...      .connect("w1", ("P", 0), ("E", 0))
        ...      .build())
    """

    def __init__(self):
        """Initialize an empty builder."""
        self._ops: dict[str, dict] = {}
        self._wires: dict[str, Wire] = {}

    def add_operation(
        self,
        op_id: str,
        inputs: Sequence[str] = (),
        outputs: Sequence[str] = (),
        gate: str | GateSpec = "id",
        args: Iterable = (),
        outcomes: int | Sequence[str] = 1,
    ) -> "CircuitBuilder":
        """Add an operation.

        Args:
            op_id: Operation identifier.
            inputs: Wire-type label of each input port.
            outputs: Wire-type label of each output port.
            gate: Gate name or a full GateSpec.
            args: Gate arguments when ``gate`` is a name.
            outcomes: Number of outcomes, or explicit outcome tokens.

        Returns:
            Self for chaining.
        """
        if op_id in self._ops:
            raise CircuitError(f"Duplicate operation id: {op_id}")
        setting = gate if isinstance(gate, GateSpec) else GateSpec(gate, tuple(args))
        tokens = (
            tuple(str(i) for i in range(outcomes))
            if isinstance(outcomes, int)
            else tuple(str(t) for t in outcomes)
        )
        self._ops[op_id] = {
            "inputs": [Port(i, t) for i, t in enumerate(inputs)],
            "outputs": [Port(i, t) for i, t in enumerate(outputs)],
            "setting": setting,
            "outcomes": tokens,
        }
        return self

    def close(self, op_id: str, direction: str, index: int) -> "CircuitBuilder":
        """Mark a port closed.

        Args:
            op_id: Operation identifier.
            direction: ``"in"`` or ``"out"``.
            index: Port index.

        Returns:
            Self for chaining.
        """
        ports = self._ports(op_id, direction)
        if not 0 <= index < len(ports):
            raise CircuitError(f"{op_id} has no {direction} port {index}")
        port = ports[index]
        ports[index] = Port(port.index, port.wire_type, closed=True)
        return self

    def connect(
        self,
        wire_id: str,
        source: tuple[str, int],
        target: tuple[str, int],
        wire_type: str | None = None,
    ) -> "CircuitBuilder":
        """Wire an output port to an input port.

        The wire type defaults to the source port's type; a mismatch with the
        target port is left for validation to report.
        """
        src_op, src_index = source
        if wire_type is None:
            ports = self._ports(src_op, OUTPUT)
            if not 0 <= src_index < len(ports):
                raise CircuitError(f"{src_op} has no out port {src_index}")
            wire_type = ports[src_index].wire_type
        self._add_wire(Wire(wire_id, wire_type, PortRef(*source), PortRef(*target)))
        return self

    def boundary_input(self, wire_id: str, target: tuple[str, int]) -> "CircuitBuilder":
        """Add a fragment input wire feeding ``target``."""
        op_id, index = target
        ports = self._ports(op_id, INPUT)
        if not 0 <= index < len(ports):
            raise CircuitError(f"{op_id} has no in port {index}")
        self._add_wire(Wire(wire_id, ports[index].wire_type, None, PortRef(op_id, index)))
        return self

    def boundary_output(self, wire_id: str, source: tuple[str, int]) -> "CircuitBuilder":
        """Add a fragment output wire leaving ``source``."""
        op_id, index = source
        ports = self._ports(op_id, OUTPUT)
        if not 0 <= index < len(ports):
            raise CircuitError(f"{op_id} has no out port {index}")
        self._add_wire(Wire(wire_id, ports[index].wire_type, PortRef(op_id, index), None))
        return self

    def lone_wire(self, wire_id: str, wire_type: str) -> "CircuitBuilder":
        """Add a wire with both ends open (an identity fragment)."""
        self._add_wire(Wire(wire_id, wire_type))
        return self

    def build(self) -> Circuit:
        """Finalize into an immutable Circuit (no validation)."""
        ops = tuple(
            OperationNode(
                op_id,
                tuple(spec["inputs"]),
                tuple(spec["outputs"]),
                spec["setting"],
                spec["outcomes"],
            )
            for op_id, spec in self._ops.items()
        )
        return Circuit(ops, tuple(self._wires.values()))

    def _ports(self, op_id: str, direction: str) -> list[Port]:
        if op_id not in self._ops:
            raise CircuitError(f"Unknown operation id: {op_id}")
        if direction not in (INPUT, OUTPUT):
            raise CircuitError(f"Port direction must be 'in' or 'out', got {direction!r}")
        return self._ops[op_id]["inputs" if direction == INPUT else "outputs"]

    def _add_wire(self, wire: Wire) -> None:
        if wire.id in self._wires:
            raise CircuitError(f"Duplicate wire id: {wire.id}")
        self._wires[wire.id] = wire
