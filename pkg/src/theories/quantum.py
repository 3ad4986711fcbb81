"""Quantum theory embedded in the p/r/Z calculus.

A density matrix rho on an N-dimensional space becomes the K = N^2 vector
p = Trace(P rho) over a fixed family of positive operators P, and a
completely positive map becomes
Z = Trace(P_out $(P_in^T)) [Trace(P_in P_in^T)]^-1.

CP maps are stored as Choi matrices J = sum_ij |i><j| (x) $(|i><j|) on
H_in (x) H_out.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Callable, Sequence

import numpy as np
from scipy.stats import unitary_group

from ..circuit.model import GateSpec, SystemType
from ..engine.vectors import SYNTHETIC, EffectVector, Label, StateVector, TransferMatrix
from ..errors import GateError, InvalidTransferMatrixError, ShapeError
from ..utils.config import PROBABILITY_TOLERANCE
from .base import Theory, ValidityReport, as_system

PSD_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class QuantumFiducialBasis:
    """N^2 linearly independent positive operators spanning the Hermitian operators.

    Attributes:
        dimension: Hilbert-space dimension N.
        operators: Array of shape (N^2, N, N).
        gram: Trace(P^a P^b).
        gram_inv: Inverse of ``gram``.
    """

    dimension: int
    operators: np.ndarray
    gram: np.ndarray
    gram_inv: np.ndarray

    @property
    def size(self) -> int:
        return len(self.operators)

    def state_entries(self, rho: np.ndarray) -> np.ndarray:
        """p = Trace(P rho)."""
        return np.real(np.einsum("aij,ji->a", self.operators, rho))

    def density(self, entries: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`state_entries`."""
        coefficients = self.gram_inv @ np.asarray(entries, dtype=float)
        return np.einsum("a,aij->ij", coefficients, self.operators)

    def effect_entries(self, effect: np.ndarray) -> np.ndarray:
        """r with r . p = Trace(E rho)."""
        return np.real(np.einsum("ij,aji->a", effect, self.operators)) @ self.gram_inv


def _projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def _make_basis(operators: np.ndarray, dimension: int) -> QuantumFiducialBasis:
    operators = np.asarray(operators, dtype=complex)
    gram = np.real(np.einsum("aij,bji->ab", operators, operators))
    if np.linalg.matrix_rank(gram) != len(operators):
        raise ShapeError(f"Fiducial operators for N={dimension} are not linearly independent")
    gram_inv = np.linalg.inv(gram)
    for array in (operators, gram, gram_inv):
        array.setflags(write=False)
    return QuantumFiducialBasis(dimension, operators, gram, gram_inv)


@lru_cache(maxsize=None)
def quantum_fiducial_basis(n: int) -> QuantumFiducialBasis:
    """The canonical fiducial basis for dimension ``n``.

    The n projectors |i><i|, then for each i < j the projectors onto
    (|i> + |j>)/sqrt2 and (|i> + i|j>)/sqrt2.
    """
    if n < 1:
        raise ShapeError("Hilbert-space dimension must be at least 1")
    eye = np.eye(n, dtype=complex)
    operators = [_projector(eye[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            operators.append(_projector((eye[i] + eye[j]) / np.sqrt(2)))
            operators.append(_projector((eye[i] + 1j * eye[j]) / np.sqrt(2)))
    return _make_basis(np.array(operators), n)


@lru_cache(maxsize=256)
def composite_basis(dims: tuple[int, ...]) -> QuantumFiducialBasis:
    """Basis for a composite: Kronecker products of factor operators, row-major."""
    operators = np.ones((1, 1, 1), dtype=complex)
    for n in dims:
        factor = quantum_fiducial_basis(n).operators
        operators = np.einsum("aij,bkl->abikjl", operators, factor).reshape(
            len(operators) * len(factor),
            operators.shape[1] * n,
            operators.shape[2] * n,
        )
    return _make_basis(operators, prod(dims))


@dataclass(frozen=True, eq=False)
class CPMap:
    """A linear map on operators, held as its Choi matrix.

    Attributes:
        input_dim: N_a.
        output_dim: N_c.
        choi: (N_a N_c) x (N_a N_c) matrix on H_in (x) H_out.
    """

    input_dim: int
    output_dim: int
    choi: np.ndarray

    def __post_init__(self) -> None:
        choi = np.array(self.choi, dtype=complex)
        size = self.input_dim * self.output_dim
        if choi.shape != (size, size):
            raise ShapeError(f"Choi matrix shape {choi.shape} does not fit {size}x{size}")
        choi.setflags(write=False)
        object.__setattr__(self, "choi", choi)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], input_dim: int, output_dim: int) -> "CPMap":
        """Choi matrix sum_k |K_k>><<K_k| with |K>> = sum_i |i> (x) K|i>."""
        choi = np.zeros((input_dim * output_dim,) * 2, dtype=complex)
        for op in kraus:
            op = np.asarray(op, dtype=complex)
            if op.shape != (output_dim, input_dim):
                raise ShapeError(f"Kraus operator shape {op.shape} != {(output_dim, input_dim)}")
            vec = op.T.reshape(-1)
            choi += np.outer(vec, vec.conj())
        return cls(input_dim, output_dim, choi)

    @classmethod
    def from_function(
        cls, channel: Callable[[np.ndarray], np.ndarray], input_dim: int, output_dim: int
    ) -> "CPMap":
        """Choi matrix of any linear map given as a function on matrices."""
        blocks = np.zeros((input_dim, output_dim, input_dim, output_dim), dtype=complex)
        for i in range(input_dim):
            for j in range(input_dim):
                unit = np.zeros((input_dim, input_dim), dtype=complex)
                unit[i, j] = 1.0
                blocks[i, :, j, :] = channel(unit)
        return cls(input_dim, output_dim, blocks.reshape(input_dim * output_dim, -1))

    @classmethod
    def from_superoperator(cls, superop: np.ndarray, input_dim: int, output_dim: int) -> "CPMap":
        blocks = np.asarray(superop).reshape(output_dim, output_dim, input_dim, input_dim)
        choi = blocks.transpose(2, 0, 3, 1).reshape(input_dim * output_dim, -1)
        return cls(input_dim, output_dim, choi)

    @property
    def _blocks(self) -> np.ndarray:
        d_in, d_out = self.input_dim, self.output_dim
        return self.choi.reshape(d_in, d_out, d_in, d_out)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """$(rho) = Tr_in[(rho^T (x) I) J]."""
        return np.einsum("ij,iojp->op", np.asarray(rho, dtype=complex), self._blocks)

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major vec(rho)."""
        d_in, d_out = self.input_dim, self.output_dim
        return self._blocks.transpose(1, 3, 0, 2).reshape(d_out * d_out, d_in * d_in)

    def compose(self, first: "CPMap") -> "CPMap":
        """This map applied after ``first``."""
        if first.output_dim != self.input_dim:
            raise ShapeError("Composed maps have mismatched dimensions")
        return CPMap.from_superoperator(
            self.superoperator() @ first.superoperator(), first.input_dim, self.output_dim
        )

    def kraus(self, tol: float = 1e-12) -> list[np.ndarray]:
        """Kraus operators from the spectral decomposition of the Choi matrix."""
        values, vectors = np.linalg.eigh((self.choi + self.choi.conj().T) / 2)
        ops = []
        for value, vector in zip(values, vectors.T):
            if value > tol:
                ops.append(np.sqrt(value) * vector.reshape(self.input_dim, self.output_dim).T)
        return ops

    def tensor(self, other: "CPMap") -> "CPMap":
        """The map acting on two systems side by side."""
        kraus = [np.kron(a, b) for a in self.kraus() for b in other.kraus()]
        if not kraus:
            kraus = [np.zeros((self.output_dim * other.output_dim, self.input_dim * other.input_dim))]
        return CPMap.from_kraus(
            kraus, self.input_dim * other.input_dim, self.output_dim * other.output_dim
        )

    def validity(self, tol: float = PSD_TOLERANCE) -> ValidityReport:
        """Check complete positivity and complete trace non-increase."""
        report = ValidityReport()
        if not np.all(np.isfinite(self.choi)):
            report.add("Choi matrix has non-finite entries", float("inf"))
            return report
        asymmetry = float(np.max(np.abs(self.choi - self.choi.conj().T), initial=0.0))
        if asymmetry > 1e-8:
            report.add("Choi matrix is not Hermitian (map not Hermiticity preserving)", asymmetry)
        values = np.linalg.eigvalsh((self.choi + self.choi.conj().T) / 2)
        scale = max(float(values.max(initial=0.0)), 1.0)
        if values.size and values.min() < -tol * scale:
            report.add(f"negative Choi eigenvalue {values.min():.6g}", -float(values.min()))
        reduced = np.einsum("iojo->ij", self._blocks)
        slack = np.linalg.eigvalsh(np.eye(self.input_dim) - (reduced + reduced.conj().T) / 2)
        if slack.size and slack.min() < -tol * scale:
            report.add("map increases trace", -float(slack.min()))
        return report


def quantum_transfer_matrix(
    cp_map: CPMap,
    basis_in: QuantumFiducialBasis,
    basis_out: QuantumFiducialBasis,
    input_system: SystemType = SystemType(),
    output_system: SystemType = SystemType(),
    label: Label = SYNTHETIC,
    check: bool = True,
) -> TransferMatrix:
    """Z = Trace(P_out $(P_in^T)) [Trace(P_in P_in^T)]^-1.

    Raises:
        InvalidTransferMatrixError: If ``check`` and the map is not CP or
            increases trace.
    """
    if (cp_map.input_dim, cp_map.output_dim) != (basis_in.dimension, basis_out.dimension):
        raise ShapeError("CP map dimensions do not match the fiducial bases")
    if check:
        report = cp_map.validity()
        if not report.valid:
            raise InvalidTransferMatrixError(f"Invalid CP map: {report}", report)
    images = np.array([cp_map.apply(op) for op in basis_in.operators])
    overlaps = np.einsum("bij,gji->bg", basis_out.operators, images)
    entries = np.real(overlaps) @ basis_in.gram_inv
    return TransferMatrix(input_system, output_system, entries, label)


def choi_from_transfer_matrix(
    entries: np.ndarray, basis_in: QuantumFiducialBasis, basis_out: QuantumFiducialBasis
) -> CPMap:
    """Invert the embedding: the CP map whose transfer matrix is ``entries``."""
    d_in, d_out = basis_in.dimension, basis_out.dimension
    image_coefficients = basis_out.gram_inv @ np.asarray(entries) @ basis_in.gram
    vec_in = basis_in.operators.reshape(len(basis_in.operators), -1).T
    vec_out = basis_out.operators.reshape(len(basis_out.operators), -1).T
    superop = vec_out @ image_coefficients @ np.linalg.inv(vec_in)
    return CPMap.from_superoperator(superop, d_in, d_out)


def _as_complex_array(value, ndim: int, what: str) -> np.ndarray:
    """Real array of rank ``ndim`` or complex one given as trailing [re, im] pairs."""
    try:
        array = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise GateError(f"{what} is not a numeric array") from None
    if array.ndim == ndim:
        return array.astype(complex)
    if array.ndim == ndim + 1 and array.shape[-1] == 2:
        return array[..., 0] + 1j * array[..., 1]
    raise GateError(f"{what} must be a rank-{ndim} array (complex entries as [re, im])")


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class QuantumTheory(Theory):
    """Quantum theory with K = N^2 and Z matrices built from CP maps."""

    name = "quantum"
    gate_names = frozenset(
        {
            "id", "x", "z", "h", "cnot", "depolarize", "measure_z", "prep_ket",
            "prep_density", "povm", "kraus", "trace", "matrix",
        }
    )

    def fiducial_count(self, n: int) -> int:
        return n * n

    def hilbert_dims(self, system) -> list[int]:
        return [self.N(label) for label in as_system(system)]

    def hilbert_dim(self, system) -> int:
        return prod(self.hilbert_dims(system))

    def basis(self, system) -> QuantumFiducialBasis:
        return composite_basis(tuple(self.hilbert_dims(system)))

    def factor_trace_effect(self, label: str) -> np.ndarray:
        return quantum_fiducial_basis(self.N(label)).effect_entries(np.eye(self.N(label)))

    def state_from_density(self, rho: np.ndarray, system) -> StateVector:
        system = as_system(system)
        return StateVector(system, self.basis(system).state_entries(np.asarray(rho)))

    def density_from_state(self, state: StateVector) -> np.ndarray:
        return self.basis(state.system).density(state.entries)

    def effect_from_operator(self, effect: np.ndarray, system) -> EffectVector:
        system = as_system(system)
        return EffectVector(system, self.basis(system).effect_entries(np.asarray(effect)))

    def transfer_matrix(
        self, cp_map: CPMap, inputs, outputs, label: Label = SYNTHETIC, check: bool = True
    ) -> TransferMatrix:
        inputs, outputs = as_system(inputs), as_system(outputs)
        return quantum_transfer_matrix(
            cp_map, self.basis(inputs), self.basis(outputs), inputs, outputs, label, check
        )

    def cp_map_of(self, z: TransferMatrix) -> CPMap:
        return choi_from_transfer_matrix(
            z.entries, self.basis(z.input_system), self.basis(z.output_system)
        )

    def validate_transfer_matrix(
        self, z: TransferMatrix, tol: float = PSD_TOLERANCE
    ) -> ValidityReport:
        """Rebuild the Choi matrix from Z and check CP and trace non-increase."""
        expected = (self.K(z.output_system), self.K(z.input_system))
        if z.shape != expected:
            report = ValidityReport()
            report.add(f"shape {z.shape} differs from {expected}", abs(z.shape[0] - expected[0]))
            return report
        return self.cp_map_of(z).validity(tol)

    def is_homogeneous(self, state: StateVector, tol: float = PROBABILITY_TOLERANCE) -> bool:
        """Homogeneous iff the density matrix has numerical rank at most one."""
        values = np.linalg.eigvalsh(self._hermitian(self.density_from_state(state)))
        largest = float(np.abs(values).max(initial=0.0))
        if largest <= tol:
            return True
        return int(np.sum(np.abs(values) > max(tol, 1e-8 * largest))) <= 1

    def correlated_extension(self, state: StateVector) -> StateVector:
        """sum_i lambda_i |v_i><v_i| (x) |i><i| from the eigendecomposition."""
        rho = self._hermitian(self.density_from_state(state))
        values, vectors = np.linalg.eigh(rho)
        d = len(values)
        joint = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            marker = np.zeros((d, d))
            marker[i, i] = 1.0
            joint += max(values[i], 0.0) * np.kron(_projector(vectors[:, i]), marker)
        return self.state_from_density(joint, state.system + state.system)

    def extensions(self, state: StateVector, rng: np.random.Generator, count: int = 8) -> list[StateVector]:
        """rho (x) sigma for random sigma: the only extensions of a rank-one rho."""
        rho = self.density_from_state(state)
        found = []
        for _ in range(count):
            sigma = random_density_matrix(len(rho), rng)
            found.append(self.state_from_density(np.kron(rho, sigma), state.system + state.system))
        return found

    def random_state(self, system, rng: np.random.Generator) -> StateVector:
        system = as_system(system)
        return self.state_from_density(random_density_matrix(self.hilbert_dim(system), rng), system)

    def gate_maps(self, spec: GateSpec, inputs: SystemType, outputs: SystemType) -> list[CPMap]:
        """CP maps of a gate, one per outcome (not for inline ``matrix`` gates)."""
        if spec.name not in self.gate_names:
            raise GateError(f"Unknown quantum gate: {spec.name}")
        d_in, d_out = self.hilbert_dim(inputs), self.hilbert_dim(outputs)
        args = spec.json_args()

        def unitary(u: np.ndarray) -> list[CPMap]:
            _expect(spec, inputs == outputs and u.shape == (d_in, d_in), "needs matching qubit ports")
            _expect_args(spec, args, 0)
            return [CPMap.from_kraus([u], d_in, d_out)]

        if spec.name == "id":
            _expect(spec, inputs == outputs, "needs identical input and output types")
            return unitary(np.eye(d_in))
        if spec.name == "x":
            return unitary(PAULI_X)
        if spec.name == "z":
            return unitary(PAULI_Z)
        if spec.name == "h":
            return unitary(HADAMARD)
        if spec.name == "cnot":
            _expect(spec, len(inputs) == 2, "acts on two wires")
            return unitary(CNOT)

        if spec.name == "depolarize":
            _expect(spec, inputs == outputs, "needs identical input and output types")
            _expect_args(spec, args, 1)
            strength = args[0]
            if isinstance(strength, bool) or not isinstance(strength, (int, float)) or not 0 <= strength <= 1:
                raise GateError(f"Gate {spec.name}: strength {strength!r} must lie in [0, 1]")
            mixed = np.eye(d_in) / d_in
            return [
                CPMap.from_function(
                    lambda rho: (1 - strength) * rho + strength * np.trace(rho) * mixed, d_in, d_out
                )
            ]

        if spec.name == "measure_z":
            _expect(spec, not inputs.is_null and outputs in (SystemType(), inputs), "measures its input")
            _expect_args(spec, args, 0)
            maps = []
            for value in range(d_in):
                ket = np.zeros(d_in, dtype=complex)
                ket[value] = 1.0
                op = ket[None, :] if outputs.is_null else _projector(ket)
                maps.append(CPMap.from_kraus([op], d_in, d_out))
            return maps

        if spec.name == "trace":
            _expect(spec, outputs.is_null, "has no outputs")
            _expect_args(spec, args, 0)
            return [CPMap.from_kraus([np.eye(d_in)[i : i + 1, :] for i in range(d_in)], d_in, 1)]

        if spec.name == "prep_ket":
            _expect(spec, inputs.is_null and not outputs.is_null, "prepares from nothing")
            _expect_args(spec, args, 1)
            ket = _as_complex_array(args[0], 1, "prep_ket vector")
            if ket.shape != (d_out,):
                raise GateError(f"prep_ket vector has length {len(ket)}; ports need {d_out}")
            if np.vdot(ket, ket).real > 1 + 1e-9:
                raise GateError("prep_ket vector has norm above 1")
            return [CPMap.from_kraus([ket[:, None]], 1, d_out)]

        if spec.name == "prep_density":
            _expect(spec, inputs.is_null and not outputs.is_null, "prepares from nothing")
            _expect_args(spec, args, 1)
            rho = _as_complex_array(args[0], 2, "prep_density matrix")
            if rho.shape != (d_out, d_out):
                raise GateError(f"prep_density matrix has shape {rho.shape}; ports need {(d_out, d_out)}")
            return [CPMap(1, d_out, rho)]

        if spec.name == "povm":
            _expect(spec, outputs.is_null and not inputs.is_null, "is an effect on its inputs")
            if not args:
                raise GateError("povm needs at least one element")
            elements = [_as_complex_array(e, 2, "povm element") for e in args]
            for element in elements:
                if element.shape != (d_in, d_in):
                    raise GateError(f"povm element has shape {element.shape}; ports need {(d_in, d_in)}")
            return [CPMap(d_in, 1, element.T) for element in elements]

        if spec.name == "kraus":
            if not args:
                raise GateError("kraus needs at least one outcome")
            maps = []
            for outcome in args:
                ops = [_as_complex_array(k, 2, "Kraus operator") for k in outcome]
                try:
                    maps.append(CPMap.from_kraus(ops, d_in, d_out))
                except ShapeError as exc:
                    raise GateError(str(exc)) from None
            return maps

        raise GateError(f"Gate {spec.name} is given by transfer matrices, not CP maps")

    def gate(self, spec: GateSpec, inputs: SystemType, outputs: SystemType) -> list[TransferMatrix]:
        if spec.name == "matrix":
            return self._inline_matrices(spec, inputs, outputs)
        maps = self.gate_maps(spec, inputs, outputs)
        d_in = self.hilbert_dim(inputs)
        total = CPMap(d_in, self.hilbert_dim(outputs), sum(m.choi for m in maps))
        report = total.validity()
        if not report.valid:
            raise GateError(f"Gate {spec}: outcomes together are invalid ({report})")
        matrices = []
        for i, cp_map in enumerate(maps):
            try:
                matrices.append(self.transfer_matrix(cp_map, inputs, outputs, f"{spec.name}:{i}"))
            except InvalidTransferMatrixError as exc:
                raise GateError(f"Gate {spec}: outcome {i}: {exc}") from None
        return matrices

    def _inline_matrices(self, spec: GateSpec, inputs: SystemType, outputs: SystemType) -> list[TransferMatrix]:
        shape = (self.K(outputs), self.K(inputs))
        matrices = []
        for i, raw in enumerate(spec.json_args()):
            entries = np.asarray(raw, dtype=float)
            if entries.shape != shape:
                raise GateError(f"Gate matrix has shape {entries.shape}; ports need {shape}")
            z = TransferMatrix(inputs, outputs, entries, f"matrix:{i}")
            report = self.validate_transfer_matrix(z)
            if not report.valid:
                raise GateError(f"Gate matrix {i} is not a valid quantum transformation: {report}")
            matrices.append(z)
        if not matrices:
            raise GateError("Gate matrix needs at least one matrix")
        total = TransferMatrix(inputs, outputs, sum(z.entries for z in matrices))
        report = self.validate_transfer_matrix(total)
        if not report.valid:
            raise GateError(f"Gate matrices together are invalid: {report}")
        return matrices

    @staticmethod
    def _hermitian(matrix: np.ndarray) -> np.ndarray:
        return (matrix + matrix.conj().T) / 2


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a complex Ginibre matrix."""
    rank = rank or dim
    ginibre = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = ginibre @ ginibre.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.eye(1, dtype=complex)


def _expect(spec: GateSpec, condition: bool, message: str) -> None:
    if not condition:
        raise GateError(f"Gate {spec.name} {message}; port types do not fit")


def _expect_args(spec: GateSpec, args: list, count: int) -> None:
    if len(args) != count:
        raise GateError(f"Gate {spec.name} takes {count} argument(s), got {len(args)}")
