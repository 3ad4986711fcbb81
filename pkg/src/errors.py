"""Exception hierarchy.

Everything derives from ValueError so callers that only care about bad
input can keep catching that.
"""
from __future__ import annotations

from typing import Any


class GPTCircuitError(ValueError):
    """Base class for all package errors."""


class CircuitError(GPTCircuitError):
    """Unknown identifiers, invalid circuits, or open circuits where closed ones are needed."""


class FoliationError(GPTCircuitError):
    """A wire-set sequence is not a (complete) foliation of the circuit."""


class FragmentError(GPTCircuitError):
    """Fragment ports are not synchronous or do not match the fragment boundary."""


class AssignmentError(GPTCircuitError):
    """An outcome assignment is incomplete or names an unknown outcome."""


class ShapeError(GPTCircuitError):
    """Matrix or system shapes are inconsistent."""


class ProbabilityRangeError(GPTCircuitError):
    """An evaluated probability fell outside [-tol, 1 + tol]."""

    def __init__(self, value: float, tol: float):
        super().__init__(
            f"Probability {value!r} is outside [-{tol}, 1 + {tol}]; "
            "a transfer matrix of the theory is invalid"
        )
        self.value = value
        self.tol = tol


class DegenerateStateError(GPTCircuitError):
    """An operation is undefined on the null state."""


class TheoryError(GPTCircuitError):
    """Unknown theory or an operation the theory does not support."""


class NotLocallyTomographicError(TheoryError):
    """The theory does not satisfy K_ab = K_a * K_b."""


class UnsupportedClassificationError(TheoryError):
    """The theory lacks the predicate needed for a classification."""


class GateError(TheoryError):
    """Unknown gate, arity mismatch or invalid gate arguments."""


class InvalidTransferMatrixError(GPTCircuitError):
    """A transfer matrix failed the theory's validity predicate."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class CircuitParseError(GPTCircuitError):
    """Circuit text could not be turned into a document.

    Attributes:
        diagnostics: Positioned diagnostics, never empty.
    """

    def __init__(self, diagnostics: list):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse error")


class MixtureError(GPTCircuitError):
    """Mixture weights are negative, sum above one, or do not match the states."""


class ConfigError(GPTCircuitError):
    """An environment setting could not be read."""
