from __future__ import annotations

from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.checks.generators import random_classical_circuit
from src.circuit.builder import CircuitBuilder
from src.circuit.foliation import (
    complete_foliation,
    enumerate_complete_foliations,
    fragment_layers,
    future,
    is_after,
    is_hypersurface,
    is_synchronous,
    layer_decomposition,
    past,
)
from src.circuit.model import FINAL, INITIAL, STEP, Circuit, Foliation, Hypersurface
from src.errors import CircuitError, FoliationError, FragmentError


def surfaces(foliation: Foliation) -> list[set[str]]:
    return [set(h.wires) for h in foliation]


def test_synchronous_sets(simpleex):
    assert is_synchronous(simpleex, {"a", "b", "c", "d"})
    assert is_synchronous(simpleex, {"f", "g"})
    assert not is_synchronous(simpleex, {"a", "f"})
    assert not is_synchronous(simpleex, {"b", "g"})
    with pytest.raises(CircuitError):
        is_synchronous(simpleex, {"nope"})


def test_past_and_future(simpleex):
    assert past(simpleex, {"e"}) == {"alpha", "beta", "gamma"}
    assert future(simpleex, {"e"}) == {"epsilon", "zeta"}
    assert future(simpleex, {"a", "d"}) == {"delta", "epsilon", "zeta"}


def test_hypersurfaces(simpleex):
    assert is_hypersurface(simpleex, {"a", "b", "c", "d"})
    assert is_hypersurface(simpleex, {"d", "e", "f"})
    # synchronous but does not cut the circuit in two
    assert is_synchronous(simpleex, {"a", "e"})
    assert not is_hypersurface(simpleex, {"a", "e"})
    assert not is_hypersurface(simpleex, set())


def test_empty_hypersurface_needs_two_parts(simpleex, commuting_boxes):
    union = simpleex.disjoint_union(commuting_boxes.relabel("R_"))
    assert is_hypersurface(union, set())


def test_is_after(simpleex):
    assert is_after(simpleex, {"a", "b", "c", "d"}, {"f", "g"})
    assert not is_after(simpleex, {"f", "g"}, {"a", "b", "c", "d"})
    assert is_after(simpleex, {"d", "e", "f"}, {"d", "e", "f"})
    with pytest.raises(FoliationError):
        is_after(simpleex, {"a", "e"}, {"f", "g"})


def test_complete_foliation_of_simpleex(simpleex):
    foliation = complete_foliation(simpleex)
    assert surfaces(foliation) == [
        {"a", "b", "c", "d"},
        {"b", "c", "d", "f"},
        {"d", "e", "f"},
        {"f", "g"},
    ]
    assert foliation.wires == frozenset(simpleex.wire_ids)


def test_commuting_boxes_have_two_foliations(commuting_boxes):
    found = enumerate_complete_foliations(commuting_boxes)
    assert [surfaces(f) for f in found] == [
        [{"a", "b"}, {"b", "c"}, {"c", "d"}],
        [{"a", "b"}, {"a", "d"}, {"c", "d"}],
    ]
    assert found[0] == complete_foliation(commuting_boxes)


def test_enumeration_limit(simpleex):
    assert len(enumerate_complete_foliations(simpleex)) == 3
    assert len(enumerate_complete_foliations(simpleex, limit=2)) == 2
    with pytest.raises(ValueError):
        enumerate_complete_foliations(simpleex, limit=0)


def test_open_circuit_has_no_complete_foliation():
    circuit = CircuitBuilder().add_operation("P", outputs=["bit"], gate="set", args=[0]).build()
    with pytest.raises(CircuitError):
        complete_foliation(circuit)


def test_layer_decomposition(simpleex):
    layers = layer_decomposition(simpleex, complete_foliation(simpleex))
    assert [layer.kind for layer in layers] == [INITIAL, STEP, STEP, STEP, FINAL]
    assert [layer.operations for layer in layers] == [
        ("alpha", "beta"),
        ("delta",),
        ("gamma",),
        ("epsilon",),
        ("zeta",),
    ]
    step = layers[2]
    assert step.passthrough == ("d", "f")
    assert step.in_order == ("b", "c", "d", "f")
    assert step.out_order == ("e", "d", "f")
    assert step.target == ("d", "e", "f")


def test_layer_decomposition_rejects_bad_foliations(simpleex):
    with pytest.raises(FoliationError, match="missing"):
        layer_decomposition(simpleex, Foliation(({"a", "b", "c", "d"},)))
    backwards = Foliation(({"a", "b", "c", "d"}, {"f", "g"}, {"d", "e", "f"}))
    with pytest.raises(FoliationError):
        layer_decomposition(simpleex, backwards)


def test_fragment_layers():
    fragment = (
        CircuitBuilder()
        .add_operation("P", outputs=["bit"], gate="set", args=[1])
        .add_operation("U", inputs=["bit", "bit"], outputs=["bit", "bit"])
        .boundary_input("i", ("U", 0))
        .connect("p", ("P", 0), ("U", 1))
        .boundary_output("o1", ("U", 0))
        .boundary_output("o2", ("U", 1))
        .build()
    )
    layers = fragment_layers(fragment)
    assert [layer.operations for layer in layers] == [("P",), ("U",)]
    assert layers[0].passthrough == ("i",)
    assert layers[-1].target == ("o1", "o2")


def test_fragment_with_dangling_port_is_rejected():
    fragment = (
        CircuitBuilder()
        .add_operation("U", inputs=["bit", "bit"], outputs=["bit"])
        .boundary_input("i", ("U", 0))
        .boundary_output("o", ("U", 0))
        .build()
    )
    with pytest.raises(FragmentError, match="U.in1"):
        fragment_layers(fragment)


def layerings_by_brute_force(circuit: Circuit) -> set[tuple[frozenset[str], ...]]:
    """Surface sequences of every topological order of the non-preparation operations."""
    preps = [op.id for op in circuit.operations if op.is_preparation]
    start = frozenset(w for op_id in preps for w in circuit.output_wires(op_id))
    others = [op_id for op_id in circuit.op_ids if op_id not in preps]
    found = set()
    for order in permutations(others):
        frontier, trail = start, [start]
        for op_id in order:
            ins = frozenset(circuit.input_wires(op_id))
            if not ins <= frontier:
                break
            frontier = (frontier - ins) | frozenset(circuit.output_wires(op_id))
            trail.append(frontier)
        else:
            # the last operation empties the frontier and is not a surface
            found.add(tuple(trail[:-1]))
    return found


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_foliations_of_random_circuits_are_ordered_hypersurfaces(seed):
    circuit = random_classical_circuit(np.random.default_rng(seed), max_ops=6, max_n=2).circuit
    found = enumerate_complete_foliations(circuit)
    assert found[0] == complete_foliation(circuit)
    for foliation in found:
        assert foliation.wires == frozenset(circuit.wire_ids)
        for h in foliation:
            assert is_hypersurface(circuit, h)
        surfaces = foliation.hypersurfaces
        for earlier, later in zip(surfaces, surfaces[1:]):
            assert is_after(circuit, earlier, later)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_enumeration_matches_brute_force(seed):
    circuit = random_classical_circuit(np.random.default_rng(seed), max_ops=6, max_n=2).circuit
    found = [tuple(h.wires for h in foliation) for foliation in enumerate_complete_foliations(circuit)]
    assert len(found) == len(set(found))
    assert set(found) == layerings_by_brute_force(circuit)
