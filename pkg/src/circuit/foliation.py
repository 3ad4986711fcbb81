"""Time in a circuit: synchronous sets, hypersurfaces and foliations.

Every function here is pure; circuits are immutable.
"""
from __future__ import annotations

import logging
from typing import Iterable, Iterator, Optional

import networkx as nx

from ..errors import FoliationError, FragmentError
from .model import FINAL, INITIAL, STEP, Circuit, Foliation, Hypersurface, Layer
from .validation import require_valid

logger = logging.getLogger(__name__)


def _as_wire_set(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> frozenset[str]:
    if isinstance(wires, Hypersurface):
        wires = wires.wires
    return circuit.require_wires(wires)


def is_synchronous(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> bool:
    """True iff no trace-forward path connects two wires of the set.

    Raises:
        CircuitError: If a wire id is unknown.
    """
    ids = _as_wire_set(circuit, wires)
    reachable_ops: dict[str, set[str]] = {}
    for wid in ids:
        wire = circuit.wire(wid)
        if wire.target is None:
            continue
        start = wire.target.op
        if start not in reachable_ops:
            reachable_ops[start] = nx.descendants(circuit.graph, start) | {start}
        for other in ids:
            source = circuit.wire(other).source
            if other != wid and source is not None and source.op in reachable_ops[start]:
                return False
    return True


def past(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> frozenset[str]:
    """Operations from which a member wire can be reached (its sources included)."""
    ids = _as_wire_set(circuit, wires)
    ops: set[str] = set()
    for wid in ids:
        source = circuit.wire(wid).source
        if source is not None and source.op not in ops:
            ops.add(source.op)
            ops |= nx.ancestors(circuit.graph, source.op)
    return frozenset(ops)


def future(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> frozenset[str]:
    """Operations reachable by tracing forward from a member wire."""
    ids = _as_wire_set(circuit, wires)
    ops: set[str] = set()
    for wid in ids:
        target = circuit.wire(wid).target
        if target is not None and target.op not in ops:
            ops.add(target.op)
            ops |= nx.descendants(circuit.graph, target.op)
    return frozenset(ops)


def is_hypersurface(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> bool:
    """True iff the set is synchronous and cutting it splits the circuit in two.

    After removing the member wires, each connected piece of the circuit must
    lie wholly on the past side or wholly on the future side, with every
    member wire running from past to future. The empty set qualifies only
    when the circuit has at least two disconnected parts.

    Raises:
        CircuitError: If a wire id is unknown.
    """
    ids = _as_wire_set(circuit, wires)
    if not is_synchronous(circuit, ids):
        return False

    cut = nx.Graph()
    cut.add_nodes_from(circuit.op_ids)
    for wire in circuit.wires:
        if wire.id in ids or wire.source is None or wire.target is None:
            continue
        cut.add_edge(wire.source.op, wire.target.op)
    piece = {
        op: index
        for index, component in enumerate(nx.connected_components(cut))
        for op in component
    }

    if not ids:
        return len(set(piece.values())) >= 2

    past_pieces = {piece[circuit.wire(w).source.op] for w in ids if circuit.wire(w).source}
    future_pieces = {piece[circuit.wire(w).target.op] for w in ids if circuit.wire(w).target}
    return not (past_pieces & future_pieces)


def _require_hypersurface(circuit: Circuit, wires: Hypersurface | Iterable[str]) -> frozenset[str]:
    ids = _as_wire_set(circuit, wires)
    if not is_hypersurface(circuit, ids):
        raise FoliationError(f"Not a hypersurface: {Hypersurface(ids)}")
    return ids


def is_after(
    circuit: Circuit,
    h1: Hypersurface | Iterable[str],
    h2: Hypersurface | Iterable[str],
) -> bool:
    """True iff ``h2`` is after ``h1``: past(h1) and future(h2) share no operation.

    Raises:
        FoliationError: If either set is not a hypersurface.
    """
    first = _require_hypersurface(circuit, h1)
    second = _require_hypersurface(circuit, h2)
    return not (past(circuit, first) & future(circuit, second))


def _in_wires(circuit: Circuit, op_id: str) -> frozenset[str]:
    return frozenset(circuit.input_wires(op_id))


def _out_wires(circuit: Circuit, op_id: str) -> frozenset[str]:
    return frozenset(circuit.output_wires(op_id))


def _ready(
    circuit: Circuit,
    frontier: frozenset[str],
    remaining: Iterable[str],
    allow_empty: bool,
) -> list[str]:
    """Operations whose inputs all lie on the frontier, lowest id first.

    Unless ``allow_empty``, an operation that would leave an empty frontier
    is held back: it belongs to the final layer.
    """
    ready = []
    for op_id in sorted(remaining):
        ins = _in_wires(circuit, op_id)
        if not ins <= frontier:
            continue
        if not allow_empty and not _out_wires(circuit, op_id) and ins == frontier:
            continue
        ready.append(op_id)
    return ready


def _advance(circuit: Circuit, frontier: frozenset[str], op_id: str) -> frozenset[str]:
    return (frontier - _in_wires(circuit, op_id)) | _out_wires(circuit, op_id)


def _initial_state(circuit: Circuit) -> tuple[frozenset[str], set[str]]:
    preps = [op.id for op in circuit.operations if op.is_preparation]
    frontier = frozenset(w for op_id in preps for w in _out_wires(circuit, op_id))
    remaining = set(circuit.op_ids) - set(preps)
    return frontier, remaining


def complete_foliation(circuit: Circuit) -> Foliation:
    """Build a complete foliation by repeated substitution.

    Starts from all initial wires and repeatedly substitutes the outputs of
    the ready operation with the lowest id for its inputs.

    Args:
        circuit: A valid, closed circuit.

    Returns:
        The foliation; empty when the circuit has no wires.

    Raises:
        CircuitError: If the circuit is invalid or not closed.
    """
    require_valid(circuit)
    if not circuit.wires:
        return Foliation(())

    frontier, remaining = _initial_state(circuit)
    surfaces = [Hypersurface(frontier)]
    while True:
        ready = _ready(circuit, frontier, remaining, allow_empty=False)
        if not ready:
            break
        op_id = ready[0]
        remaining.discard(op_id)
        frontier = _advance(circuit, frontier, op_id)
        logger.debug("foliation step past %s -> %s", op_id, Hypersurface(frontier))
        surfaces.append(Hypersurface(frontier))
    return Foliation(tuple(surfaces))


def enumerate_complete_foliations(circuit: Circuit, limit: Optional[int] = None) -> list[Foliation]:
    """List distinct complete foliations by backtracking over ready operations.

    The first foliation returned equals :func:`complete_foliation`.

    Args:
        circuit: A valid, closed circuit.
        limit: Maximum number of foliations; None for no limit.

    Returns:
        Up to ``limit`` foliations.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be a positive integer")
    require_valid(circuit)
    if not circuit.wires:
        return [Foliation(())]

    found: list[Foliation] = []

    def walk(frontier: frozenset[str], remaining: frozenset[str], trail: list[Hypersurface]) -> Iterator[Foliation]:
        ready = _ready(circuit, frontier, remaining, allow_empty=False)
        if not ready:
            yield Foliation(tuple(trail))
            return
        for op_id in ready:
            nxt = _advance(circuit, frontier, op_id)
            trail.append(Hypersurface(nxt))
            yield from walk(nxt, remaining - {op_id}, trail)
            trail.pop()

    frontier, remaining = _initial_state(circuit)
    for foliation in walk(frontier, frozenset(remaining), [Hypersurface(frontier)]):
        found.append(foliation)
        if limit is not None and len(found) >= limit:
            break
    return found


def _layer(
    circuit: Circuit,
    kind: str,
    ops: list[str],
    passthrough: Iterable[str],
    source: Iterable[str],
    target: Iterable[str],
) -> Layer:
    ops = sorted(ops)
    passthrough = tuple(sorted(passthrough))
    in_order = tuple(w for op_id in ops for w in circuit.input_wires(op_id)) + passthrough
    out_order = tuple(w for op_id in ops for w in circuit.output_wires(op_id)) + passthrough
    return Layer(
        kind=kind,
        operations=tuple(ops),
        passthrough=passthrough,
        source=tuple(sorted(source)),
        target=tuple(sorted(target)),
        in_order=in_order,
        out_order=out_order,
    )


def layer_decomposition(circuit: Circuit, foliation: Foliation) -> list[Layer]:
    """Split a circuit into layers along a complete foliation.

    Emits an initial layer (operations before H_1), one layer per
    consecutive pair of hypersurfaces, and a final layer (operations after
    H_T). Each layer records its pass-through wires and the wire alignment
    on both sides.

    Raises:
        FoliationError: If the foliation is not a complete foliation of the circuit.
    """
    require_valid(circuit)
    surfaces = [_as_wire_set(circuit, h) for h in foliation]
    if foliation.wires != frozenset(circuit.wire_ids):
        missing = sorted(set(circuit.wire_ids) - foliation.wires)
        raise FoliationError(f"Foliation is not complete; missing wires: {', '.join(missing)}")
    if not surfaces:
        return [_layer(circuit, INITIAL, list(circuit.op_ids), (), (), ())]

    for h in surfaces:
        _require_hypersurface(circuit, h)
    for earlier, later in zip(surfaces, surfaces[1:]):
        if not is_after(circuit, earlier, later):
            raise FoliationError(f"{Hypersurface(later)} is not after {Hypersurface(earlier)}")

    unused = set(circuit.op_ids)
    layers = []

    initial = [
        op.id
        for op in circuit.operations
        if op.is_preparation and _out_wires(circuit, op.id) <= surfaces[0]
    ]
    produced = frozenset(w for op_id in initial for w in _out_wires(circuit, op_id))
    if produced != surfaces[0]:
        raise FoliationError(f"{Hypersurface(surfaces[0])} is not made of initial wires")
    layers.append(_layer(circuit, INITIAL, initial, (), (), surfaces[0]))
    unused -= set(initial)

    for earlier, later in zip(surfaces, surfaces[1:]):
        consumed, created = earlier - later, later - earlier
        members = [
            op_id
            for op_id in sorted(unused)
            if _in_wires(circuit, op_id) <= consumed
            and _out_wires(circuit, op_id) <= created
            and (_in_wires(circuit, op_id) or _out_wires(circuit, op_id))
        ]
        ins = frozenset(w for op_id in members for w in _in_wires(circuit, op_id))
        outs = frozenset(w for op_id in members for w in _out_wires(circuit, op_id))
        if ins != consumed or outs != created:
            raise FoliationError(
                f"{Hypersurface(earlier)} and {Hypersurface(later)} are not separated by whole operations"
            )
        layers.append(_layer(circuit, STEP, members, earlier & later, earlier, later))
        unused -= set(members)

    last = surfaces[-1]
    final = sorted(unused)
    if any(_out_wires(circuit, op_id) for op_id in final) or frozenset(
        w for op_id in final for w in _in_wires(circuit, op_id)
    ) != last:
        raise FoliationError(f"Operations after {Hypersurface(last)} do not close the circuit")
    layers.append(_layer(circuit, FINAL, final, (), last, ()))
    logger.debug("decomposed into %d layers", len(layers))
    return layers


def fragment_layers(circuit: Circuit) -> list[Layer]:
    """Schedule a circuit fragment from its input boundary to its output boundary.

    The initial layer holds the preparations with the boundary inputs passing
    through; afterwards one operation is applied per layer, lowest id first.

    Raises:
        FragmentError: If some open port is unwired or the fragment cannot be
            swept from inputs to outputs.
    """
    require_valid(circuit, closed=False)
    if circuit.open_ports():
        op_id, direction, index = circuit.open_ports()[0]
        raise FragmentError(f"Open port {op_id}.{direction}{index} has no wire")

    boundary_in = frozenset(circuit.boundary_inputs)
    preps = [op.id for op in circuit.operations if op.is_preparation]
    frontier = boundary_in | frozenset(w for op_id in preps for w in _out_wires(circuit, op_id))
    layers = [_layer(circuit, INITIAL, preps, boundary_in, boundary_in, frontier)]
    remaining = set(circuit.op_ids) - set(preps)
    while remaining:
        ready = _ready(circuit, frontier, remaining, allow_empty=True)
        if not ready:
            raise FragmentError("Fragment operations cannot be reached from its inputs")
        op_id = ready[0]
        remaining.discard(op_id)
        nxt = _advance(circuit, frontier, op_id)
        layers.append(_layer(circuit, STEP, [op_id], frontier & nxt, frontier, nxt))
        frontier = nxt
    if frontier != frozenset(circuit.boundary_outputs):
        raise FragmentError("Fragment sweep does not end on its output wires")
    return layers

