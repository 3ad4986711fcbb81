"""Classical probability theory: K = N and substochastic transfer matrices."""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from ..circuit.model import NULL_SYSTEM, GateSpec, SystemType
from ..engine.vectors import SYNTHETIC, Label, StateVector, TransferMatrix
from ..errors import GateError, InvalidTransferMatrixError, ShapeError
from ..utils.config import CLASSICAL_TOLERANCE, PROBABILITY_TOLERANCE
from .base import Theory, ValidityReport, as_system

EXTENSION_GRID = 4


def substochastic_report(entries: np.ndarray, tol: float = CLASSICAL_TOLERANCE) -> ValidityReport:
    """Check nonnegative entries and column sums at most one."""
    report = ValidityReport()
    entries = np.asarray(entries, dtype=float)
    if entries.size == 0:
        return report
    if not np.all(np.isfinite(entries)):
        report.add("non-finite entry", float("inf"))
        return report
    most_negative = float(entries.min())
    if most_negative < -tol:
        report.add("negative entry", -most_negative)
    column_sums = entries.sum(axis=0)
    excess = float(column_sums.max()) - 1.0
    if excess > tol:
        report.add(f"column sum {column_sums.max():.6g} exceeds 1", excess)
    return report


def classical_transfer_matrix(
    matrix: Sequence[Sequence[float]] | np.ndarray,
    input_system: SystemType,
    output_system: SystemType,
    label: Label = SYNTHETIC,
    tol: float = CLASSICAL_TOLERANCE,
) -> TransferMatrix:
    """Wrap a validated substochastic matrix.

    Raises:
        InvalidTransferMatrixError: On a negative entry or a column sum above 1.
    """
    entries = np.asarray(matrix, dtype=float)
    if entries.ndim != 2:
        raise ShapeError(f"Classical transfer matrix must be 2-D, got shape {entries.shape}")
    report = substochastic_report(entries, tol)
    if not report.valid:
        raise InvalidTransferMatrixError(f"Not substochastic: {report}", report)
    return TransferMatrix(input_system, output_system, entries, label)


class ClassicalTheory(Theory):
    """Classical probability theory.

    States are subnormalized probability vectors over the N distinguishable
    values, the trace effect is the all-ones row and norm-preserving
    transformations are stochastic matrices.
    """

    name = "classical"
    gate_names = frozenset({"id", "flip", "set", "prep", "readout", "discard", "matrix"})

    def fiducial_count(self, n: int) -> int:
        return n

    def factor_trace_effect(self, label: str) -> np.ndarray:
        return np.ones(self.K(label))

    def validate_transfer_matrix(
        self, z: TransferMatrix, tol: float = CLASSICAL_TOLERANCE
    ) -> ValidityReport:
        report = ValidityReport()
        expected = (self.K(z.output_system), self.K(z.input_system))
        if z.shape != expected:
            report.add(f"shape {z.shape} differs from {expected}", abs(z.shape[0] - expected[0]))
            return report
        return substochastic_report(z.entries, tol)

    def is_homogeneous(self, state: StateVector, tol: float = PROBABILITY_TOLERANCE) -> bool:
        """A classical state is homogeneous iff it has at most one nonzero entry."""
        return int(np.sum(np.abs(state.entries) > tol)) <= 1

    def correlated_extension(self, state: StateVector) -> StateVector:
        """Perfectly correlated copy: sum_i p_i e_i (x) e_i."""
        system = state.system
        k = self.K(system)
        joint = np.zeros((k, k))
        joint[np.arange(k), np.arange(k)] = state.entries
        return StateVector(system + system, joint.reshape(-1))

    def extensions(self, state: StateVector, rng: np.random.Generator) -> list[StateVector]:
        """Every grid joint distribution whose first marginal is parallel to ``state``.

        Joint distributions with entries in multiples of 1/EXTENSION_GRID are
        enumerated exhaustively and rescaled to the state's norm.
        """
        system = state.system
        k = self.K(system)
        norm = float(state.entries.sum())
        if norm <= 0:
            return [StateVector(system + system, np.zeros(k * k))]
        target = state.entries / norm
        found = []
        for counts in _compositions(EXTENSION_GRID, k * k):
            joint = np.array(counts, dtype=float).reshape(k, k) / EXTENSION_GRID
            if np.allclose(joint.sum(axis=1), target, atol=1e-12):
                found.append(StateVector(system + system, norm * joint.reshape(-1)))
        return found

    def random_state(self, system, rng: np.random.Generator) -> StateVector:
        system = as_system(system)
        return StateVector(system, rng.dirichlet(np.ones(self.K(system))))

    def gate(self, spec: GateSpec, inputs: SystemType, outputs: SystemType) -> list[TransferMatrix]:
        if spec.name not in self.gate_names:
            raise GateError(f"Unknown classical gate: {spec.name}")
        k_in, k_out = self.K(inputs), self.K(outputs)
        args = spec.json_args()

        def wrap(matrices: list[np.ndarray]) -> list[TransferMatrix]:
            result = []
            for i, m in enumerate(matrices):
                label = f"{spec.name}:{i}"
                result.append(classical_transfer_matrix(m, inputs, outputs, label))
            total = substochastic_report(sum(matrices))
            if not total.valid:
                raise GateError(f"Gate {spec}: outcomes together are not substochastic ({total})")
            return result

        if spec.name == "id":
            _expect(spec, inputs == outputs, "needs identical input and output types")
            _expect_args(spec, args, 0)
            return wrap([np.eye(k_in)])

        if spec.name == "flip":
            _expect(spec, inputs == outputs and len(inputs) == 1, "acts on one wire")
            _expect_args(spec, args, 1)
            p = _probability(spec, args[0])
            shift = np.roll(np.eye(k_in), 1, axis=0)
            return wrap([(1 - p) * np.eye(k_in) + p * shift])

        if spec.name == "set":
            _expect(spec, len(outputs) == 1 and inputs in (NULL_SYSTEM, outputs), "sets one wire")
            _expect_args(spec, args, 1)
            value = args[0]
            if not isinstance(value, int) or not 0 <= value < k_out:
                raise GateError(f"Gate {spec}: value must be an integer in [0, {k_out})")
            matrix = np.zeros((k_out, k_in))
            matrix[value, :] = 1.0
            return wrap([matrix])

        if spec.name == "prep":
            _expect(spec, inputs.is_null and not outputs.is_null, "prepares from nothing")
            _expect_args(spec, args, k_out)
            distribution = np.array([_probability(spec, a) for a in args])[:, None]
            return wrap([distribution])

        if spec.name == "readout":
            _expect(spec, not inputs.is_null and outputs in (NULL_SYSTEM, inputs), "reads its input")
            _expect_args(spec, args, 0)
            matrices = []
            for value in range(k_in):
                if outputs.is_null:
                    row = np.zeros((1, k_in))
                    row[0, value] = 1.0
                    matrices.append(row)
                else:
                    projector = np.zeros((k_in, k_in))
                    projector[value, value] = 1.0
                    matrices.append(projector)
            return wrap(matrices)

        if spec.name == "discard":
            _expect(spec, outputs.is_null, "has no outputs")
            _expect_args(spec, args, 0)
            return wrap([np.ones((1, k_in))])

        matrices = [np.asarray(m, dtype=float) for m in args]
        if not matrices:
            raise GateError(f"Gate {spec.name}: needs at least one matrix")
        for m in matrices:
            if m.shape != (k_out, k_in):
                raise GateError(f"Gate matrix has shape {m.shape}; ports need {(k_out, k_in)}")
        return wrap(matrices)


def _expect(spec: GateSpec, condition: bool, message: str) -> None:
    if not condition:
        raise GateError(f"Gate {spec.name} {message}; port types do not fit")


def _expect_args(spec: GateSpec, args: list, count: int) -> None:
    if len(args) != count:
        raise GateError(f"Gate {spec.name} takes {count} argument(s), got {len(args)}")


def _probability(spec: GateSpec, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 <= value <= 1:
        raise GateError(f"Gate {spec.name}: {value!r} is not a probability")
    return float(value)


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1,) + cuts + (total + parts - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(parts))
