"""Fiducial-count calculus: K(N) per model, composite checks and product-state span ranks."""
from __future__ import annotations

import time
from enum import Enum

import numpy as np

from ..errors import TheoryError
from ..report import CheckResult, Status
from ..utils.config import RANK_TOLERANCE
from .quantum import composite_basis, random_density_matrix


class CountingModel(str, Enum):
    """Theories known only through their K(N) formula."""

    CLASSICAL = "classical"
    QUANTUM = "quantum"
    REAL_QUANTUM = "real-quantum"
    QUATERNIONIC_QUANTUM = "quaternionic-quantum"

    @classmethod
    def parse(cls, name: str) -> "CountingModel":
        """Accept the canonical names plus the short aliases ``real`` and ``quaternionic``."""
        key = name.strip().lower()
        aliases = {"real": cls.REAL_QUANTUM, "quaternionic": cls.QUATERNIONIC_QUANTUM}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise TheoryError(f"Unknown counting model {name!r}; expected one of {known}") from None


def counting_K(model: CountingModel | str, n: int) -> int:
    """Fiducial count K for a system with N distinguishable states.

    Args:
        model: Counting model or its name.
        n: N >= 1.

    Returns:
        classical N, quantum N^2, real N + N(N-1)/2,
        quaternionic N + 4N(N-1)/2.
    """
    if isinstance(model, str) and not isinstance(model, CountingModel):
        model = CountingModel.parse(model)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise TheoryError(f"N must be a positive integer, got {n!r}")
    n = int(n)
    pairs = n * (n - 1) // 2
    if model is CountingModel.CLASSICAL:
        return n
    if model is CountingModel.QUANTUM:
        return n * n
    if model is CountingModel.REAL_QUANTUM:
        return n + pairs
    return n + 4 * pairs


def composite_counting_check(model: CountingModel | str, n_a: int, n_b: int) -> CheckResult:
    """Compare K_ab = K(N_a N_b) with K_a K_b.

    K_ab >= K_a K_b must hold; equality means the model is locally
    tomographic. A model with K_ab < K_a K_b fails the check.
    """
    started = time.perf_counter()
    if isinstance(model, str) and not isinstance(model, CountingModel):
        model = CountingModel.parse(model)
    k_a, k_b = counting_K(model, n_a), counting_K(model, n_b)
    k_ab = counting_K(model, n_a * n_b)
    product = k_a * k_b
    relation = "=" if k_ab == product else (">" if k_ab > product else "<")
    consistent = k_ab >= product
    measured = {
        "model": model.value,
        "N_a": n_a,
        "N_b": n_b,
        "K_a": k_a,
        "K_b": k_b,
        "K_ab": k_ab,
        "K_aK_b": product,
        "relation": relation,
        "locally_tomographic": k_ab == product,
        "consistent": consistent,
    }
    if consistent:
        details = f"K_ab={k_ab} {relation} K_aK_b={product}"
        if k_ab == product:
            details += ", locally tomographic"
    else:
        details = f"K_ab={k_ab} < K_aK_b={product}, VIOLATES K_ab >= K_aK_b"
    return CheckResult(
        name=f"counting/{model.value}/{n_a}x{n_b}",
        status=Status.PASS if consistent else Status.FAIL,
        measured=measured,
        tolerance=0.0,
        runtime_s=time.perf_counter() - started,
        details=details,
    )


def _symmetric_vector(matrix: np.ndarray) -> np.ndarray:
    rows, cols = np.triu_indices(len(matrix))
    return matrix[rows, cols]


def _random_real_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim))
    rho = g @ g.T
    return rho / np.trace(rho)


def numerical_rank(vectors: np.ndarray, tol: float = RANK_TOLERANCE) -> int:
    """Singular values above ``tol`` times the largest one."""
    values = np.linalg.svd(np.asarray(vectors, dtype=float), compute_uv=False)
    if not values.size or values[0] == 0:
        return 0
    return int(np.sum(values > tol * values[0]))


def product_state_span_rank(
    model: CountingModel | str,
    n_a: int,
    n_b: int,
    samples: int,
    rng: np.random.Generator,
    tol: float = RANK_TOLERANCE,
) -> int:
    """Rank of the span of random product states of an N_a x N_b composite.

    Classical states are probability vectors, quantum states their fiducial
    vectors, and real-quantum states Kronecker products of real symmetric
    PSD matrices written over the symmetric basis.

    Raises:
        TheoryError: For the quaternionic model, or too few samples.
    """
    if isinstance(model, str) and not isinstance(model, CountingModel):
        model = CountingModel.parse(model)
    if samples < counting_K(model, n_a) * counting_K(model, n_b):
        raise TheoryError("Need at least K_a K_b samples to span the product states")

    vectors = []
    if model is CountingModel.CLASSICAL:
        for _ in range(samples):
            vectors.append(np.kron(rng.dirichlet(np.ones(n_a)), rng.dirichlet(np.ones(n_b))))
    elif model is CountingModel.QUANTUM:
        basis = composite_basis((n_a, n_b))
        for _ in range(samples):
            rho = np.kron(random_density_matrix(n_a, rng), random_density_matrix(n_b, rng))
            vectors.append(basis.state_entries(rho))
    elif model is CountingModel.REAL_QUANTUM:
        for _ in range(samples):
            rho = np.kron(_random_real_density(n_a, rng), _random_real_density(n_b, rng))
            vectors.append(_symmetric_vector(rho))
    else:
        raise TheoryError(f"No state space is modelled for {model.value}")
    return numerical_rank(np.array(vectors), tol)
