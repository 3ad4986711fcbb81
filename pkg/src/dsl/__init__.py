"""Text (``.gptc``) and JSON formats for circuits."""
from __future__ import annotations

from pathlib import Path

from .document import CircuitDocument, CloseDecl, OperationDecl, WireDecl
from .json_schema import SCHEMA_VERSION, document_from_json, document_to_json
from .parser import Diagnostic, parse_circuit
from .serializer import serialize_circuit


def load_document(path: Path | str) -> CircuitDocument:
    """Read a ``.json`` document or, for any other suffix, ``.gptc`` text.

    Raises:
        CircuitParseError: If the file does not parse.
    """
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".json":
        return document_from_json(data)
    return parse_circuit(data)


__all__ = [
    "SCHEMA_VERSION",
    "CircuitDocument",
    "CloseDecl",
    "Diagnostic",
    "OperationDecl",
    "WireDecl",
    "document_from_json",
    "document_to_json",
    "load_document",
    "parse_circuit",
    "serialize_circuit",
]
