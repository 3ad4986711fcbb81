from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from conftest import BELL_TEXT, COIN_TEXT
from hypothesis import given, settings
from hypothesis import strategies as st

from src.checks.generators import random_document
from src.circuit.model import GateSpec, PortRef
from src.dsl import (
    CircuitDocument,
    document_from_json,
    document_to_json,
    load_document,
    parse_circuit,
    serialize_circuit,
)
from src.engine.evaluation import evaluate_circuit
from src.errors import CircuitParseError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def codes(text: str | bytes) -> list[str]:
    with pytest.raises(CircuitParseError) as excinfo:
        parse_circuit(text)
    return [d.code for d in excinfo.value.diagnostics]


def test_parse_bell():
    document = parse_circuit(BELL_TEXT)
    assert document.theory == "quantum"
    assert document.type_map == {"q": 2}
    assert [op.id for op in document.operations] == ["B", "M1", "M2"]
    assert document.operations[1].outcomes == 2
    assert document.wires[0].source == PortRef("B", 0)
    circuit = document.to_circuit()
    assert circuit.is_closed
    p = evaluate_circuit(circuit, {"M1": "0", "M2": "0"}, document.build_theory())
    assert p == pytest.approx(0.5, abs=1e-12)


def test_outcome_count_is_taken_from_the_gate():
    document = parse_circuit(COIN_TEXT.replace(" outcomes=2", ""))
    assert document.operations[0].id == "E"
    assert document.operations[0].outcomes == 2
    assert document.default_assignment() == {"E": "1"}


def test_merged_default_outcome():
    document = parse_circuit(COIN_TEXT.replace("outcome E=1", "outcome E=1|0"))
    assert document.default_assignment() == {"E": frozenset({"0", "1"})}


def test_comments_and_blank_lines_are_ignored():
    text = "\n# header\n" + COIN_TEXT.replace("type bit N=2", "type bit N=2   # a bit")
    assert parse_circuit(text) == parse_circuit(COIN_TEXT)


def test_closures_and_fragments():
    text = (
        "theory quantum\ntype q N=2\n"
        "op U : q -> q,q gate=kraus([[[1,0],[0,0],[0,0],[0,1]]])\n"
        "close U.out1\n"
        "wire i - -> U.in0\nwire o U.out0 -> -\nwire lone - -> - type=q\n"
    )
    document = parse_circuit(text)
    circuit = document.to_circuit()
    assert circuit.boundary_inputs == ("i", "lone")
    assert circuit.boundary_outputs == ("lone", "o")
    assert circuit.operation("U").outputs[1].closed
    assert parse_circuit(serialize_circuit(document)) == document


@pytest.mark.parametrize(
    "text, code",
    [
        ("type q N=2\n", "theory"),
        ("theory quantum\ntheory classical\n", "duplicate-id"),
        ("theory quantum\nfrobnicate\n", "unknown-directive"),
        ("theory stringy\n", "theory"),
        ("theory quantum\ntype q N=65\n", "type"),
        ("theory quantum\ntype q N=2\nop P : - -> r gate=prep_ket([1,0])\n", "unknown-type"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=warp\n", "unknown-gate"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=prep_ket([1,0\n", "syntax"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=prep_ket({})\n", "gate-args"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=prep_ket(NaN)\n", "gate-args"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=prep_density([[1e400,0],[0,0]])\n", "gate-args"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=matrix([[1e400],[0],[0],[0]])\n", "gate-args"),
        ("theory quantum\ntype q N=2\nop U : q,q,q,q,q -> q,q,q,q,q gate=id\n", "too-large"),
        ("theory quantum\ntype q N=32\nop P : - -> q gate=prep_ket([1])\n", "too-large"),
        ("theory quantum\ntype q N=2\nop M : q -> - gate=measure_z outcomes=3\n", "arity"),
        ("theory classical\ntype b N=2\nop X : b -> b gate=matrix([[2,0],[0,1]])\n", "invalid-matrix"),
        ("theory quantum\ntype q N=2\nwire w - -> -\n", "wire-type"),
        ("theory quantum\ntype q N=2\nclose P.out0\n", "unknown-reference"),
        ("theory quantum\ntype q N=2\noutcome M=0\n", "unknown-reference"),
        (COIN_TEXT.replace("outcome E=1", "outcome E=2"), "unknown-outcome"),
        ("theory quantum\ntype q N=2\nop P : - -> q gate=prep_ket([1,0])\nop P : - -> q gate=h\n", "duplicate-id"),
    ],
)
def test_diagnostic_codes(text, code):
    assert code in codes(text)


def test_structural_violations_become_diagnostics():
    text = (
        "theory classical\ntype bit N=2\ntype trit N=3\n"
        "op P : - -> bit gate=set(0)\nop E : trit -> - gate=discard\n"
        "wire w P.out0 -> E.in0\n"
    )
    with pytest.raises(CircuitParseError) as excinfo:
        parse_circuit(text)
    (diagnostic,) = excinfo.value.diagnostics
    assert diagnostic.code == "type-mismatch"
    assert diagnostic.line == 6


def test_cycle_is_a_diagnostic():
    text = (
        "theory classical\ntype bit N=2\n"
        "op A : bit -> bit gate=id\nop B : bit -> bit gate=id\n"
        "wire x A.out0 -> B.in0\nwire y B.out0 -> A.in0\n"
    )
    assert codes(text) == ["cycle"]


def test_diagnostics_are_positioned_and_sorted():
    text = "theory quantum\n  bogus line\ntype q N=x\n"
    with pytest.raises(CircuitParseError) as excinfo:
        parse_circuit(text)
    diagnostics = excinfo.value.diagnostics
    assert [(d.line, d.column) for d in diagnostics] == [(2, 3), (3, 8)]
    assert str(diagnostics[0]).startswith("line 2, column 3:")


def test_bad_utf8_is_positioned():
    with pytest.raises(CircuitParseError) as excinfo:
        parse_circuit(b"theory quantum\ntype \xff N=2\n")
    (diagnostic,) = excinfo.value.diagnostics
    assert (diagnostic.line, diagnostic.column, diagnostic.code) == (2, 6, "encoding")


def test_serialization_is_canonical():
    shuffled = (
        "theory classical\n"
        "outcome E=1\n"
        "wire w1 P.out0 -> E.in0\n"
        "op P : - -> bit gate=prep(0.25, 0.75)\n"
        "op E : bit -> - gate=readout\n"
        "type bit N=2\n"
    )
    assert serialize_circuit(parse_circuit(shuffled)) == (
        "theory classical\n"
        "type bit N=2\n"
        "op E : bit -> - gate=readout outcomes=2\n"
        "op P : - -> bit gate=prep(0.25,0.75) outcomes=1\n"
        "wire w1 P.out0 -> E.in0\n"
        "outcome E=1\n"
    )


def test_floats_survive_the_round_trip():
    value = 0.1 + 0.2
    text = COIN_TEXT.replace("prep(0.25,0.75)", f"prep({value!r},{1 - value!r})")
    document = parse_circuit(text)
    again = parse_circuit(serialize_circuit(document))
    assert again.operations[1].gate == GateSpec("prep", (value, 1 - value))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_documents_round_trip(seed):
    document = random_document(np.random.default_rng(seed))
    assert parse_circuit(serialize_circuit(document)) == document
    assert document_from_json(json.dumps(document_to_json(document))) == document


def test_json_form(bell_file):
    document = load_document(bell_file)
    data = document_to_json(document)
    assert data["schema"] == 1
    assert data["types"] == {"q": 2}
    assert data["wires"][0] == {"id": "w1", "source": "B.out0", "target": "M1.in0"}
    assert data["operations"][1]["gate"] == "measure_z"


def test_json_problems_have_paths():
    with pytest.raises(CircuitParseError) as excinfo:
        document_from_json({"schema": 2, "theory": 7, "operations": [{"id": "P"}]})
    messages = [d.message for d in excinfo.value.diagnostics]
    assert any(m.startswith("$.schema") for m in messages)
    assert any(m.startswith("$.theory") for m in messages)
    assert any(m.startswith("$.operations[0].gate") for m in messages)
    with pytest.raises(CircuitParseError) as excinfo:
        document_from_json("{not json")
    assert excinfo.value.diagnostics[0].code == "json"


def test_load_document_by_suffix(tmp_path):
    document = parse_circuit(COIN_TEXT)
    path = tmp_path / "coin.json"
    path.write_text(json.dumps(document_to_json(document)))
    assert load_document(path) == document


def test_from_circuit_round_trip(simpleex):
    document = CircuitDocument.from_circuit(simpleex, "classical", {"bit": 2}, {"zeta": "2"})
    assert parse_circuit(serialize_circuit(document)) == document
    assert document.default_assignment() == {"zeta": "2"}


@pytest.mark.parametrize(
    "name, expected",
    [("bell.gptc", 0.5), ("simpleex.gptc", 0.185), ("coin.json", 0.75)],
)
def test_samples_evaluate(name, expected):
    document = load_document(SAMPLES / name)
    circuit = document.to_circuit()
    p = evaluate_circuit(circuit, document.default_assignment(), document.build_theory())
    assert p == pytest.approx(expected, abs=1e-12)
