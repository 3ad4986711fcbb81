"""Shared circuits and theories for the test suite."""
from __future__ import annotations

import pytest

from src.circuit.builder import CircuitBuilder
from src.circuit.model import Circuit
from src.theories import ClassicalTheory, QuantumTheory

BIT = "bit"
XOR = [[1, 0, 0, 1], [0, 1, 1, 0]]

BELL_TEXT = """\
# Bell pair measured on both sides
theory quantum
type q N=2
op B : - -> q,q gate=prep_ket([0.7071067811865476,0,0,0.7071067811865476])
op M1 : q -> - gate=measure_z outcomes=2
op M2 : q -> - gate=measure_z outcomes=2
wire w1 B.out0 -> M1.in0
wire w2 B.out1 -> M2.in0
"""

COIN_TEXT = """\
theory classical
type bit N=2
op P : - -> bit gate=prep(0.25,0.75)
op E : bit -> - gate=readout outcomes=2
wire w1 P.out0 -> E.in0
outcome E=1
"""


def build_simpleex() -> Circuit:
    """Six operations on seven bit wires.

    alpha prepares (a, b), beta prepares (c, d); delta flips a into f,
    gamma and epsilon XOR their inputs into e and g, and zeta reads (f, g).
    """
    return (
        CircuitBuilder()
        .add_operation("alpha", outputs=[BIT, BIT], gate="prep", args=[0.1, 0.2, 0.3, 0.4])
        .add_operation("beta", outputs=[BIT, BIT], gate="prep", args=[0.5, 0.0, 0.25, 0.25])
        .add_operation("delta", inputs=[BIT], outputs=[BIT], gate="flip", args=[0.3])
        .add_operation("gamma", inputs=[BIT, BIT], outputs=[BIT], gate="matrix", args=[XOR])
        .add_operation("epsilon", inputs=[BIT, BIT], outputs=[BIT], gate="matrix", args=[XOR])
        .add_operation("zeta", inputs=[BIT, BIT], gate="readout", outcomes=4)
        .connect("a", ("alpha", 0), ("delta", 0))
        .connect("b", ("alpha", 1), ("gamma", 0))
        .connect("c", ("beta", 0), ("gamma", 1))
        .connect("d", ("beta", 1), ("epsilon", 1))
        .connect("e", ("gamma", 0), ("epsilon", 0))
        .connect("f", ("delta", 0), ("zeta", 0))
        .connect("g", ("epsilon", 0), ("zeta", 1))
        .build()
    )


def build_commuting_boxes() -> Circuit:
    """A correlated pair prepared by P, boxes A and B on each half, read by E."""
    return (
        CircuitBuilder()
        .add_operation("P", outputs=[BIT, BIT], gate="prep", args=[0.4, 0.1, 0.1, 0.4])
        .add_operation("A", inputs=[BIT], outputs=[BIT], gate="flip", args=[0.2])
        .add_operation("B", inputs=[BIT], outputs=[BIT], gate="flip", args=[0.1])
        .add_operation("E", inputs=[BIT, BIT], gate="readout", outcomes=4)
        .connect("a", ("P", 0), ("A", 0))
        .connect("b", ("P", 1), ("B", 0))
        .connect("c", ("A", 0), ("E", 0))
        .connect("d", ("B", 0), ("E", 1))
        .build()
    )


@pytest.fixture
def bits() -> ClassicalTheory:
    return ClassicalTheory({BIT: 2})


@pytest.fixture
def qubits() -> QuantumTheory:
    return QuantumTheory({"q": 2})


@pytest.fixture
def simpleex() -> Circuit:
    return build_simpleex()


@pytest.fixture
def commuting_boxes() -> Circuit:
    return build_commuting_boxes()


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.gptc"
    path.write_text(BELL_TEXT)
    return path


@pytest.fixture
def coin_file(tmp_path):
    path = tmp_path / "coin.gptc"
    path.write_text(COIN_TEXT)
    return path
