"""Seeded check suites behind ``check --suite``.

Each check draws from its own generator, seeded from the suite seed and
the check name, so a check's result does not depend on which other
checks ran. ``size`` scales the number of random instances.
"""
from __future__ import annotations

import json
import logging
import time
import zlib
from typing import Callable, Optional

import numpy as np

from ..circuit.foliation import (
    complete_foliation,
    enumerate_complete_foliations,
    layer_decomposition,
)
from ..circuit.model import Circuit, SystemType
from ..dsl import document_from_json, document_to_json, parse_circuit, serialize_circuit
from ..engine.composition import sequential_compose
from ..engine.compression import compress_to_fiducials
from ..engine.evaluation import (
    coarse_assignment,
    evaluate_circuit,
    evaluate_layers,
    outcome_assignments,
)
from ..engine.theorems import (
    check_commutation,
    check_disjoint_independence,
    check_factorization,
    check_parallel_closure,
    check_uncorrelatability,
    factorization_violation,
)
from ..engine.vectors import StateVector
from ..errors import CircuitParseError, GPTCircuitError
from ..report import CheckResult, Status
from ..theories import (
    ClassicalTheory,
    CountingModel,
    CPMap,
    QuantumTheory,
    classical_transfer_matrix,
    composite_counting_check,
    product_state_span_rank,
)
from ..theories.quantum import random_density_matrix, random_unitary
from ..utils.config import DEFAULT_CHECK_SIZE, DEFAULT_SEED, Config
from .generators import (
    QUBIT,
    random_circuit,
    random_classical_circuit,
    random_disjoint_pair,
    random_document,
    random_instrument,
    random_quantum_circuit,
    random_substochastic_split,
)
from .oracles import classical_enumeration, density_matrix_simulation

logger = logging.getLogger(__name__)

THEORY_NAMES = (ClassicalTheory.name, QuantumTheory.name)
CheckFunction = Callable[[np.random.Generator, int, Config], CheckResult]


def _result(name: str, passed: bool, measured: dict, tol: Optional[float], details: str = "") -> CheckResult:
    return CheckResult(
        name=name,
        status=Status.PASS if passed else Status.FAIL,
        measured=measured,
        tolerance=tol,
        details=details,
    )


def _random_assignment(circuit: Circuit, rng: np.random.Generator) -> dict[str, str]:
    return {op.id: op.outcomes[int(rng.integers(len(op.outcomes)))] for op in circuit.operations}


def _theory_for(index: int) -> str:
    return THEORY_NAMES[index % 2]


# -- foliation -------------------------------------------------------------


def foliation_independence(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Every complete foliation gives the same probability."""
    tol = config.probability_tolerance
    qubits = QuantumTheory({QUBIT: 2})
    spread, compared, truncated = 0.0, 0, 0
    for i in range(size):
        name = _theory_for(i)
        extra = {"theory": qubits} if name == QuantumTheory.name else {}
        generated = random_circuit(rng, name, max_ops=8, **extra)
        circuit, theory = generated.circuit, generated.theory
        assignment = _random_assignment(circuit, rng)
        foliations = enumerate_complete_foliations(circuit, limit=config.foliation_limit + 1)
        if len(foliations) > config.foliation_limit:
            truncated += 1
            foliations = foliations[: config.foliation_limit]
        values = [
            evaluate_layers(circuit, layer_decomposition(circuit, f), assignment, theory)
            for f in foliations
        ]
        compared += len(values)
        spread = max(spread, max(values) - min(values))
    return _result(
        "foliation-independence",
        spread <= tol,
        {"circuits": size, "foliations": compared, "truncated": truncated, "max_spread": spread},
        tol,
    )


def normalization(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Norm-one circuits: outcome probabilities sum to one, as does the coarse-grained circuit."""
    tol = config.probability_tolerance
    count = max(1, size // 2)
    worst_sum, worst_coarse = 0.0, 0.0
    for i in range(count):
        generated = random_circuit(rng, _theory_for(i), max_ops=4, norm_one=True)
        circuit, theory = generated.circuit, generated.theory
        layers = layer_decomposition(circuit, complete_foliation(circuit))
        total = sum(evaluate_layers(circuit, layers, a, theory) for a in outcome_assignments(circuit))
        coarse = evaluate_layers(circuit, layers, coarse_assignment(circuit), theory)
        worst_sum = max(worst_sum, abs(total - 1.0))
        worst_coarse = max(worst_coarse, abs(coarse - 1.0))
    return _result(
        "normalization",
        max(worst_sum, worst_coarse) <= tol,
        {"circuits": count, "max_sum_deviation": worst_sum, "max_coarse_deviation": worst_coarse},
        tol,
    )


# -- oracles ---------------------------------------------------------------


def classical_oracle(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Layered evaluation equals direct summation over wire values."""
    tol = config.classical_tolerance
    deviation = 0.0
    for _ in range(size):
        generated = random_classical_circuit(rng, max_ops=6, max_n=4)
        assignment = _random_assignment(generated.circuit, rng)
        engine = evaluate_circuit(generated.circuit, assignment, generated.theory)
        oracle = classical_enumeration(generated.circuit, assignment, generated.theory)
        deviation = max(deviation, abs(engine - oracle))
    return _result("classical-oracle", deviation <= tol, {"circuits": size, "max_deviation": deviation}, tol)


def quantum_oracle(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Layered evaluation equals a direct density-matrix simulation."""
    tol = config.probability_tolerance
    count = max(1, size // 2)
    theory = QuantumTheory({QUBIT: 2})
    deviation = 0.0
    for _ in range(count):
        generated = random_quantum_circuit(rng, theory=theory, max_ops=6, max_qubits=4)
        assignment = _random_assignment(generated.circuit, rng)
        engine = evaluate_circuit(generated.circuit, assignment, theory)
        oracle = density_matrix_simulation(generated.circuit, assignment, theory)
        deviation = max(deviation, abs(engine - oracle))
    return _result("quantum-oracle", deviation <= tol, {"circuits": count, "max_deviation": deviation}, tol)


_DIMENSIONS = {"d2": 2, "d3": 3, "d4": 4}


def embedding_roundtrip(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """rho -> fiducial probabilities -> rho is the identity."""
    tol = config.probability_tolerance
    theory = QuantumTheory(_DIMENSIONS)
    labels = sorted(_DIMENSIONS)
    count = max(1, size // 2)
    error = 0.0
    for i in range(count):
        label = labels[i % len(labels)]
        rho = random_density_matrix(_DIMENSIONS[label], rng, rank=int(rng.integers(1, _DIMENSIONS[label] + 1)))
        back = theory.density_from_state(theory.state_from_density(rho, label))
        error = max(error, float(np.abs(back - rho).max()))
    return _result("embedding-roundtrip", error <= tol, {"states": count, "max_error": error}, tol)


def functoriality(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """The matrix of a composed channel is the product of the matrices."""
    tol = config.probability_tolerance
    theory = QuantumTheory(_DIMENSIONS)
    labels = sorted(_DIMENSIONS)
    count = max(1, size // 2)
    error = 0.0
    for _ in range(count):
        a, b, c = (labels[int(i)] for i in rng.integers(0, len(labels), size=3))
        da, db, dc = _DIMENSIONS[a], _DIMENSIONS[b], _DIMENSIONS[c]
        first = CPMap.from_kraus(random_instrument(rng, da, db, 1, norm_one=rng.random() < 0.5)[0], da, db)
        second = CPMap.from_kraus(random_instrument(rng, db, dc, 1, norm_one=rng.random() < 0.5)[0], db, dc)
        z_first = theory.transfer_matrix(first, a, b)
        z_second = theory.transfer_matrix(second, b, c)
        z_both = theory.transfer_matrix(second.compose(first), a, c)
        product = sequential_compose(z_second, z_first)
        error = max(error, float(np.abs(product.entries - z_both.entries).max()))
    return _result("functoriality", error <= tol, {"compositions": count, "max_error": error}, tol)


def dsl_roundtrip(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """serialize then parse (text and JSON) returns the same document."""
    count = max(1, size * 5 // 2)
    mismatches = []
    for i in range(count):
        document = random_document(rng)
        text = serialize_circuit(document)
        from_text = parse_circuit(text)
        from_json = document_from_json(json.dumps(document_to_json(document)))
        if from_text != document or from_json != document or serialize_circuit(from_text) != text:
            mismatches.append(i)
    return _result(
        "dsl-roundtrip",
        not mismatches,
        {"documents": count, "mismatches": len(mismatches)},
        None,
        f"first mismatch at document {mismatches[0]}" if mismatches else "",
    )


_FUZZ_SEEDS = (
    "theory classical\ntype bit N=2\nop P : - -> bit gate=set(0)\n"
    "op E : bit -> - gate=readout outcomes=2\nwire w1 P.out0 -> E.in0\noutcome E=0\n",
    "theory quantum\ntype q N=2\nop P : - -> q gate=prep_ket([1,0])\n"
    "op H : q -> q gate=h\nop M : q -> - gate=measure_z outcomes=2\n"
    "wire a P.out0 -> H.in0\nwire b H.out0 -> M.in0\n",
)


def _fuzz_input(rng: np.random.Generator) -> bytes:
    if rng.random() < 0.8:
        return rng.integers(0, 256, size=int(rng.integers(0, 80)), dtype=np.uint8).tobytes()
    data = bytearray(_FUZZ_SEEDS[int(rng.integers(len(_FUZZ_SEEDS)))].encode())
    for _ in range(int(rng.integers(1, 4))):
        position = int(rng.integers(0, len(data) + 1))
        kind = rng.random()
        if kind < 0.4 and position < len(data):
            data[position] = int(rng.integers(0, 256))
        elif kind < 0.7 and position < len(data):
            del data[position]
        else:
            data.insert(position, int(rng.integers(0, 256)))
    return bytes(data)


def dsl_fuzz(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Arbitrary bytes either parse or raise positioned diagnostics; nothing else escapes."""
    count = max(1, size * 500)
    accepted, crashes, unpositioned = 0, [], 0
    for _ in range(count):
        data = _fuzz_input(rng)
        try:
            parse_circuit(data)
            accepted += 1
        except CircuitParseError as exc:
            if not exc.diagnostics or any(d.line < 1 or d.column < 1 for d in exc.diagnostics):
                unpositioned += 1
        except Exception as exc:  # noqa: BLE001
            crashes.append(f"{type(exc).__name__}: {exc}")
    return _result(
        "dsl-fuzz",
        not crashes and not unpositioned,
        {"inputs": count, "accepted": accepted, "crashes": len(crashes), "unpositioned": unpositioned},
        None,
        crashes[0] if crashes else "",
    )


# -- theorems --------------------------------------------------------------

_EXPECTED_RELATIONS = {
    CountingModel.CLASSICAL: "=",
    CountingModel.QUANTUM: "=",
    CountingModel.REAL_QUANTUM: ">",
    CountingModel.QUATERNIONIC_QUANTUM: "<",
}


def counting_table(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """K_ab against K_a K_b for two N=2 systems in every counting model."""
    rows, wrong = {}, []
    for model, expected in _EXPECTED_RELATIONS.items():
        check = composite_counting_check(model, 2, 2)
        rows[model.value] = check.details
        if check.measured["relation"] != expected:
            wrong.append(model.value)
    return _result(
        "counting-table",
        not wrong,
        rows,
        0.0,
        f"unexpected relation for {', '.join(wrong)}" if wrong else "",
    )


def span_ranks(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Product states of two N=2 systems span K_a K_b dimensions, below K_ab for real amplitudes."""
    expected = {CountingModel.CLASSICAL: 4, CountingModel.QUANTUM: 16, CountingModel.REAL_QUANTUM: 9}
    ranks = {}
    for model, rank in expected.items():
        ranks[model.value] = product_state_span_rank(model, 2, 2, samples=2 * rank + 8, rng=rng, tol=config.rank_tolerance)
    return _result(
        "span-ranks",
        all(ranks[m.value] == r for m, r in expected.items()),
        ranks,
        config.rank_tolerance,
    )


def _pure_product(theory, label: str, rng: np.random.Generator) -> StateVector:
    if isinstance(theory, QuantumTheory):
        ket = random_unitary(theory.N(label), rng)[:, 0]
        rho = np.kron(np.outer(ket, ket.conj()), random_density_matrix(theory.N(label), rng))
        return theory.state_from_density(rho, (label, label))
    point = np.zeros(theory.N(label))
    point[int(rng.integers(theory.N(label)))] = 1.0
    return StateVector(SystemType((label, label)), np.kron(point, rng.dirichlet(np.ones(theory.N(label)))))


def _bell_state(theory: QuantumTheory) -> StateVector:
    ket = np.zeros(4)
    ket[0] = ket[3] = 1 / np.sqrt(2)
    return theory.state_from_density(np.outer(ket, ket), (QUBIT, QUBIT))


def factorization(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """States with a pure factor factorize over complete local effect sets."""
    tol = config.probability_tolerance
    theories = [ClassicalTheory({"c": 3}), QuantumTheory({QUBIT: 2})]
    count = max(2, size // 10)
    worst, failed = 0.0, 0
    for i in range(count):
        theory = theories[i % 2]
        label = sorted(theory.types)[0]
        effects = theory.local_effects(label)
        result = check_factorization(_pure_product(theory, label, rng), effects, effects, theory, tol=tol)
        worst = max(worst, result.measured["max_violation"])
        failed += result.status is not Status.PASS
    return _result("factorization", not failed, {"states": count, "max_violation": worst, "failed": failed}, tol)


def factorization_necessity(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """An entangled state with no pure factor does not factorize."""
    theory = QuantumTheory({QUBIT: 2})
    effects = theory.local_effects(QUBIT)
    violation = factorization_violation(_bell_state(theory), effects, effects, theory)
    return _result(
        "factorization-necessity", violation > 0.1, {"max_violation": violation}, 0.1, "Bell state"
    )


def disjoint_independence(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Side-by-side circuits have product probabilities."""
    tol = config.probability_tolerance
    count = max(1, size // 2)
    worst, failed = 0.0, 0
    for i in range(count):
        first, second = random_disjoint_pair(rng, _theory_for(i), max_ops=3)
        result = check_disjoint_independence(first.circuit, second.circuit, first.theory, tol)
        worst = max(worst, result.measured["max_deviation"])
        failed += result.status is Status.FAIL
    return _result("disjoint-independence", not failed, {"pairs": count, "max_deviation": worst}, tol)


def uncorrelatability(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Pure states extend only to products, mixed ones to a correlated state."""
    tol = config.probability_tolerance
    classical, quantum = ClassicalTheory({"c": 3}), QuantumTheory({QUBIT: 2})
    ket = random_unitary(2, rng)[:, 0]
    states = [
        (classical, StateVector(SystemType(("c",)), np.array([0.0, 1.0, 0.0]))),
        (classical, classical.random_state("c", rng)),
        (quantum, quantum.state_from_density(np.outer(ket, ket.conj()), QUBIT)),
        (quantum, quantum.random_state(QUBIT, rng)),
    ]
    results = [check_uncorrelatability(state, theory, rng, tol) for theory, state in states]
    failed = [r.details for r in results if r.status is Status.FAIL]
    return _result(
        "uncorrelatability",
        not failed,
        {"states": len(results), "homogeneous": sum(bool(r.measured["homogeneous"]) for r in results)},
        tol,
        failed[0] if failed else "",
    )


def parallel_closure(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Closing the partner of a pure factor leaves a state parallel to it."""
    tol = config.probability_tolerance
    theories = [ClassicalTheory({"c": 3}), QuantumTheory({QUBIT: 2})]
    count = max(2, size // 10)
    worst, failed = 0.0, 0
    for i in range(count):
        theory = theories[i % 2]
        label = sorted(theory.types)[0]
        result = check_parallel_closure(_pure_product(theory, label, rng), theory, tol=tol)
        worst = max(worst, result.measured["max_deviation"])
        failed += result.status is not Status.PASS
    return _result("parallel-closure", not failed, {"states": count, "max_deviation": worst}, tol)


def commutation(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Operations on parallel wires commute."""
    tol = config.probability_tolerance
    classical = ClassicalTheory({"a": 2, "b": 3})
    quantum = QuantumTheory({QUBIT: 2})
    count = max(2, size // 10)
    worst = 0.0
    for i in range(count):
        if i % 2 == 0:
            z_c = classical_transfer_matrix(
                random_substochastic_split(rng, 3, 2, 1)[0], SystemType.of("a"), SystemType.of("b"), "c"
            )
            z_d = classical_transfer_matrix(
                random_substochastic_split(rng, 2, 3, 1)[0], SystemType.of("b"), SystemType.of("a"), "d"
            )
            theory = classical
        else:
            kraus_c = random_instrument(rng, 2, 2, 1)[0]
            kraus_d = random_instrument(rng, 2, 2, 1)[0]
            z_c = quantum.transfer_matrix(CPMap.from_kraus(kraus_c, 2, 2), QUBIT, QUBIT, "c")
            z_d = quantum.transfer_matrix(CPMap.from_kraus(kraus_d, 2, 2), QUBIT, QUBIT, "d")
            theory = quantum
        worst = max(worst, check_commutation(z_c, z_d, theory, tol).measured["max_deviation"])
    return _result("commutation", worst <= tol, {"pairs": count, "max_deviation": worst}, tol)


def _compression_table(theory_name: str, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    if theory_name == ClassicalTheory.name:
        k = n
        states = rng.dirichlet(np.ones(n), size=4 * k).T
        effects = np.vstack([np.eye(n), rng.uniform(0, 1, size=(3 * k, n))])
        return effects @ states, k
    k = n * n
    states = [random_density_matrix(n, rng) for _ in range(4 * k)]
    effects = []
    for _ in range(3 * k):
        u = random_unitary(n, rng)
        effects.append(u @ np.diag(rng.uniform(0, 1, size=n)) @ u.conj().T)
    table = np.array([[np.trace(e @ rho).real for rho in states] for e in effects])
    return table, k


def compression(rng: np.random.Generator, size: int, config: Config) -> CheckResult:
    """Rank-based fiducial recovery finds K and predicts held-out probabilities."""
    tol = 1e-8
    measured, wrong, error = {}, [], 0.0
    for theory_name in THEORY_NAMES:
        for n in (2, 3):
            table, k = _compression_table(theory_name, n, rng)
            train, held_out = table[:, : 2 * k], table[:, 2 * k :]
            result = compress_to_fiducials(train, config.rank_tolerance)
            predicted = result.predict(held_out[list(result.fiducial_rows)])
            error = max(error, float(np.abs(predicted - held_out).max()))
            measured[f"{theory_name}/N={n}"] = result.rank
            if result.rank != k:
                wrong.append(f"{theory_name} N={n}: K={result.rank}, expected {k}")
    measured["max_prediction_error"] = error
    return _result("compression", not wrong and error <= tol, measured, tol, "; ".join(wrong))


SUITES: dict[str, tuple[CheckFunction, ...]] = {
    "foliation": (foliation_independence, normalization),
    "theorems": (
        counting_table,
        span_ranks,
        factorization,
        factorization_necessity,
        disjoint_independence,
        uncorrelatability,
        parallel_closure,
        commutation,
        compression,
    ),
    "oracles": (
        classical_oracle,
        quantum_oracle,
        embedding_roundtrip,
        functoriality,
        dsl_roundtrip,
        dsl_fuzz,
    ),
}
SUITE_NAMES = (*SUITES, "all")


def _check_name(check: CheckFunction) -> str:
    return check.__name__.replace("_", "-")


def run_check(check: CheckFunction, seed: int, size: int, config: Config) -> CheckResult:
    """Run one check with its own generator; errors become failed results."""
    name = _check_name(check)
    rng = np.random.default_rng([seed, zlib.crc32(name.encode())])
    started = time.perf_counter()
    try:
        result = check(rng, size, config)
    except (GPTCircuitError, np.linalg.LinAlgError) as exc:
        logger.warning("Check %s raised %s", name, exc)
        result = CheckResult(name, Status.FAIL, details=f"{type(exc).__name__}: {exc}")
    result.runtime_s = time.perf_counter() - started
    return result


def run_suite(
    name: str,
    seed: int = DEFAULT_SEED,
    size: int = DEFAULT_CHECK_SIZE,
    config: Optional[Config] = None,
) -> list[CheckResult]:
    """Run a named suite (``foliation``, ``theorems``, ``oracles`` or ``all``).

    Raises:
        ValueError: Unknown suite name or size below 1.
    """
    if name not in SUITE_NAMES:
        raise ValueError(f"Unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
    if size < 1:
        raise ValueError("Suite size must be at least 1")
    config = config or Config()
    checks = [c for group in SUITES.values() for c in group] if name == "all" else list(SUITES[name])
    logger.info("Running suite %s (seed %d, size %d, %d checks)", name, seed, size, len(checks))
    results = [run_check(check, seed, size, config) for check in checks]
    logger.info("Suite %s: %d/%d passed", name, sum(r.passed for r in results), len(results))
    return results
