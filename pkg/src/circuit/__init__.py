"""Graph model of operational circuits and their foliations."""

from .builder import CircuitBuilder
from .foliation import (
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
from .model import (
    NULL_SYSTEM,
    Circuit,
    Foliation,
    GateSpec,
    Hypersurface,
    Layer,
    OperationNode,
    Port,
    PortRef,
    SystemType,
    Wire,
    WireType,
)
from .validation import ValidationReport, Violation, require_valid, validate

__all__ = [
    "NULL_SYSTEM",
    "Circuit",
    "CircuitBuilder",
    "Foliation",
    "GateSpec",
    "Hypersurface",
    "Layer",
    "OperationNode",
    "Port",
    "PortRef",
    "SystemType",
    "ValidationReport",
    "Violation",
    "Wire",
    "WireType",
    "complete_foliation",
    "enumerate_complete_foliations",
    "fragment_layers",
    "future",
    "is_after",
    "is_hypersurface",
    "is_synchronous",
    "layer_decomposition",
    "past",
    "require_valid",
    "validate",
]
