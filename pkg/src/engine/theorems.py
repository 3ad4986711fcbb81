"""Runnable structural checks: factorization, independence, uncorrelatability, commutation.

Each check returns a :class:`~src.report.CheckResult`; a violated
property is reported as data, never raised.
"""
from __future__ import annotations

import logging
import time
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from ..circuit.foliation import complete_foliation, layer_decomposition
from ..circuit.model import Circuit, SystemType
from ..circuit.validation import require_valid
from ..errors import ShapeError
from ..report import CheckResult, Status
from ..utils.config import PROBABILITY_TOLERANCE
from .composition import sequential_compose, tensor_compose
from .evaluation import evaluate_layers, outcome_assignments
from .states import reduced_state
from .vectors import EffectVector, StateVector, TransferMatrix

if TYPE_CHECKING:
    from ..theories.base import Theory

logger = logging.getLogger(__name__)

RELABEL_PREFIX = "R_"


def _split(system: SystemType, split: int) -> tuple[SystemType, SystemType]:
    if not 0 < split < len(system):
        raise ShapeError(f"Cannot split {system} after {split} factor(s)")
    return SystemType(system.factors[:split]), SystemType(system.factors[split:])


def _effect_rows(
    effects: Sequence[EffectVector], system: SystemType, theory: "Theory"
) -> np.ndarray:
    for effect in effects:
        if effect.system != system:
            raise ShapeError(f"Effect on {effect.system} supplied for {system}")
    rows = [e.entries for e in effects] + [theory.trace_effect(system).entries]
    return np.array(rows)


def factorization_violation(
    joint: StateVector,
    effects_a: Sequence[EffectVector],
    effects_b: Sequence[EffectVector],
    theory: "Theory",
    split: int = 1,
) -> float:
    """max |p(a,b) p(-,-) - p(a,-) p(-,b)| over the supplied effect pairs."""
    system_a, system_b = _split(joint.system, split)
    rows_a = _effect_rows(effects_a, system_a, theory)
    rows_b = _effect_rows(effects_b, system_b, theory)
    table = rows_a @ joint.entries.reshape(theory.K(system_a), theory.K(system_b)) @ rows_b.T
    m, n = len(effects_a), len(effects_b)
    if not m or not n:
        return 0.0
    gaps = table[:m, :n] * table[m, n] - np.outer(table[:m, n], table[m, :n])
    return float(np.abs(gaps).max())


def check_factorization(
    joint: StateVector,
    effects_a: Sequence[EffectVector],
    effects_b: Sequence[EffectVector],
    theory: "Theory",
    split: int = 1,
    tol: float = PROBABILITY_TOLERANCE,
) -> CheckResult:
    """Check p(a,b) p(-,-) = p(a,-) p(-,b) when the first part's reduced state is homogeneous.

    With a heterogeneous reduced state the result is not-applicable; the
    measured violation is still reported.
    """
    started = time.perf_counter()
    theory.require_local_tomography()
    reduced = reduced_state(joint, list(range(split)), theory)
    homogeneous = theory.is_homogeneous(reduced, tol)
    violation = factorization_violation(joint, effects_a, effects_b, theory, split)
    if not homogeneous:
        status = Status.NOT_APPLICABLE
    else:
        status = Status.PASS if violation <= tol else Status.FAIL
    return CheckResult(
        name="factorization",
        status=status,
        measured={
            "max_violation": violation,
            "pairs": len(effects_a) * len(effects_b),
            "homogeneous": homogeneous,
        },
        tolerance=tol,
        runtime_s=time.perf_counter() - started,
        details="" if homogeneous else "reduced state is heterogeneous",
    )


def check_disjoint_independence(
    c1: Circuit,
    c2: Circuit,
    theory: "Theory",
    tol: float = PROBABILITY_TOLERANCE,
) -> CheckResult:
    """Check p(c1 with c2 beside it) = p(c1) p(c2) for every outcome assignment.

    Ids of ``c2`` that clash with ``c1`` are prefixed before the union is formed.
    """
    started = time.perf_counter()
    require_valid(c1)
    require_valid(c2)
    if set(c1.op_ids) & set(c2.op_ids) or set(c1.wire_ids) & set(c2.wire_ids):
        c2 = c2.relabel(RELABEL_PREFIX)
    union = c1.disjoint_union(c2)

    def layers(circuit: Circuit):
        return layer_decomposition(circuit, complete_foliation(circuit))

    layers1, layers2, layers_union = layers(c1), layers(c2), layers(union)
    first = [(a, evaluate_layers(c1, layers1, a, theory)) for a in outcome_assignments(c1)]
    second = [(a, evaluate_layers(c2, layers2, a, theory)) for a in outcome_assignments(c2)]
    deviation = 0.0
    for a1, p1 in first:
        for a2, p2 in second:
            joint = evaluate_layers(union, layers_union, {**a1, **a2}, theory)
            deviation = max(deviation, abs(joint - p1 * p2))
    logger.debug("independence: %d x %d assignments", len(first), len(second))
    return CheckResult(
        name="disjoint-independence",
        status=Status.PASS if deviation <= tol else Status.FAIL,
        measured={"assignments": len(first) * len(second), "max_deviation": deviation},
        tolerance=tol,
        runtime_s=time.perf_counter() - started,
    )


def check_uncorrelatability(
    state: StateVector,
    theory: "Theory",
    rng: Optional[np.random.Generator] = None,
    tol: float = PROBABILITY_TOLERANCE,
) -> CheckResult:
    """Homogeneous states admit only factorizing extensions; heterogeneous ones a correlated one.

    Raises:
        UnsupportedClassificationError: If the theory cannot classify or extend states.
    """
    started = time.perf_counter()
    rng = rng or np.random.default_rng(0)
    if len(state.system) != 1:
        raise ShapeError("Uncorrelatability is checked for single-system states")
    effects = theory.local_effects(state.system)
    homogeneous = theory.is_homogeneous(state, tol)
    if homogeneous:
        extensions = theory.extensions(state, rng)
        violation = max(
            (factorization_violation(e, effects, effects, theory) for e in extensions),
            default=0.0,
        )
        status = Status.PASS if violation <= tol else Status.FAIL
        details = f"{len(extensions)} extension(s) all factorize"
        measured = {"homogeneous": True, "extensions": len(extensions), "max_violation": violation}
    else:
        extension = theory.correlated_extension(state)
        violation = factorization_violation(extension, effects, effects, theory)
        status = Status.PASS if violation > tol else Status.FAIL
        details = "correlated extension violates factorization"
        measured = {"homogeneous": False, "extensions": 1, "max_violation": violation}
    if status is Status.FAIL:
        details = "homogeneity and uncorrelatability disagree"
    return CheckResult(
        name="uncorrelatability",
        status=status,
        measured=measured,
        tolerance=tol,
        runtime_s=time.perf_counter() - started,
        details=details,
    )


def check_parallel_closure(
    joint: StateVector,
    theory: "Theory",
    split: int = 1,
    effects_b: Optional[Sequence[EffectVector]] = None,
    tol: float = PROBABILITY_TOLERANCE,
) -> CheckResult:
    """Closing the second part with any effect leaves the first part parallel to its reduced state.

    Applies when the reduced state of the first part is homogeneous;
    otherwise not-applicable with the measured deviation still reported.
    """
    started = time.perf_counter()
    theory.require_local_tomography()
    system_a, system_b = _split(joint.system, split)
    if effects_b is None:
        effects_b = theory.local_effects(system_b)
    reduced = reduced_state(joint, list(range(split)), theory).entries
    homogeneous = theory.is_homogeneous(StateVector(system_a, reduced), tol)
    block = joint.entries.reshape(theory.K(system_a), theory.K(system_b))
    scale = float(reduced @ reduced)
    deviation = 0.0
    for effect in effects_b:
        conditioned = block @ effect.entries
        if scale > 0:
            conditioned = conditioned - (conditioned @ reduced / scale) * reduced
        deviation = max(deviation, float(np.linalg.norm(conditioned)))
    if not homogeneous:
        status = Status.NOT_APPLICABLE
    else:
        status = Status.PASS if deviation <= tol else Status.FAIL
    return CheckResult(
        name="parallel-closure",
        status=status,
        measured={"homogeneous": homogeneous, "effects": len(effects_b), "max_deviation": deviation},
        tolerance=tol,
        runtime_s=time.perf_counter() - started,
    )


def check_commutation(
    z_c: TransferMatrix,
    z_d: TransferMatrix,
    theory: "Theory",
    tol: float = PROBABILITY_TOLERANCE,
) -> CheckResult:
    """Updating at either of two parallel operations first gives the same matrix.

    Compares (Z_c (x) I)(I (x) Z_d) and (I (x) Z_d)(Z_c (x) I) with Z_c (x) Z_d.
    """
    started = time.perf_counter()
    ident = theory.identity
    direct = tensor_compose(z_c, z_d, theory)
    d_first = sequential_compose(
        tensor_compose(z_c, ident(z_d.output_system), theory),
        tensor_compose(ident(z_c.input_system), z_d, theory),
    )
    c_first = sequential_compose(
        tensor_compose(ident(z_c.output_system), z_d, theory),
        tensor_compose(z_c, ident(z_d.input_system), theory),
    )
    deviation = max(
        float(np.abs(d_first.entries - direct.entries).max(initial=0.0)),
        float(np.abs(c_first.entries - direct.entries).max(initial=0.0)),
    )
    return CheckResult(
        name="commutation",
        status=Status.PASS if deviation <= tol else Status.FAIL,
        measured={"max_deviation": deviation},
        tolerance=tol,
        runtime_s=time.perf_counter() - started,
    )
