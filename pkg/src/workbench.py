"""Circuit workbench: one method per command, each returning a Report."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

from .checks.suites import run_suite
from .circuit.foliation import complete_foliation, enumerate_complete_foliations
from .circuit.model import Circuit, Foliation
from .dsl import CircuitDocument, load_document
from .engine.evaluation import evaluate_circuit
from .engine.vectors import format_outcome, parse_assignment
from .errors import FoliationError, ProbabilityRangeError
from .report import CheckResult, Report, Status
from .theories import composite_counting_check
from .utils.config import Config

logger = logging.getLogger(__name__)


def _foliation_data(foliation: Foliation) -> list[list[str]]:
    return [list(h.ordered) for h in foliation]


class CircuitWorkbench:
    """Loads circuit documents and runs evaluations and checks on them."""

    def __init__(self, config: Config | None = None):
        """Initialize the workbench.

        Args:
            config: Configuration object. If None, loads from environment.
        """
        self.config = config or Config.load()

    def load(self, path: str | Path) -> tuple[CircuitDocument, Circuit]:
        """Parse a ``.gptc`` or ``.json`` document and build its circuit."""
        document = load_document(path)
        return document, document.to_circuit()

    def validate(self, path: str | Path, command: Sequence[str] = ()) -> Report:
        """Check a document; parse and structure problems raise CircuitParseError."""
        document, circuit = self.load(path)
        values = {
            "theory": document.theory,
            "operations": len(circuit.operations),
            "wires": len(circuit.wires),
            "closed": circuit.is_closed,
            "boundary_inputs": list(circuit.boundary_inputs),
            "boundary_outputs": list(circuit.boundary_outputs),
        }
        check = CheckResult("structure", Status.PASS, measured={"violations": 0})
        return Report(list(command), [check], values)

    def foliate(
        self,
        path: str | Path,
        all_foliations: bool = False,
        limit: Optional[int] = None,
        command: Sequence[str] = (),
    ) -> Report:
        """One complete foliation, or every one up to ``limit``."""
        _, circuit = self.load(path)
        if all_foliations:
            foliations = enumerate_complete_foliations(circuit, limit or self.config.foliation_limit)
        else:
            foliations = [complete_foliation(circuit)]
        values = {
            "count": len(foliations),
            "foliations": [_foliation_data(f) for f in foliations],
        }
        return Report(list(command), [], values)

    def evaluate(
        self,
        path: str | Path,
        outcomes: Optional[str] = None,
        foliation_index: Optional[int] = None,
        command: Sequence[str] = (),
    ) -> Report:
        """Probability of the document's circuit for an outcome assignment.

        The document's ``outcome`` lines are the defaults; ``outcomes``
        (``op=tok,...``) overrides them per operation.

        Raises:
            AssignmentError: On a malformed or incomplete assignment.
            FoliationError: If ``foliation_index`` is out of range.
        """
        document, circuit = self.load(path)
        theory = document.build_theory()
        assignment = {**document.default_assignment(), **parse_assignment(outcomes or "")}

        foliation = None
        if foliation_index is not None:
            if foliation_index < 0:
                raise FoliationError("Foliation index must be non-negative")
            found = enumerate_complete_foliations(circuit, foliation_index + 1)
            if foliation_index >= len(found):
                raise FoliationError(
                    f"Circuit has {len(found)} complete foliation(s); index {foliation_index} is out of range"
                )
            foliation = found[foliation_index]

        tol = self.config.probability_tolerance
        values = {
            "assignment": {op: format_outcome(v) for op, v in sorted(assignment.items())},
            "foliation": foliation_index or 0,
        }
        try:
            probability = evaluate_circuit(circuit, assignment, theory, foliation, tol)
            check = CheckResult("probability-range", Status.PASS, {"probability": probability}, tol)
        except ProbabilityRangeError as exc:
            probability = exc.value
            check = CheckResult(
                "probability-range", Status.FAIL, {"probability": probability}, tol, details=str(exc)
            )
        values["probability"] = probability
        logger.info("p(%s) = %r", values["assignment"], probability)
        return Report(list(command), [check], values)

    def counting(self, model: str, n_a: int, n_b: int, command: Sequence[str] = ()) -> Report:
        """Compare K_ab with K_a K_b for a counting model."""
        check = composite_counting_check(model, n_a, n_b)
        return Report(list(command), [check], {"details": check.details})

    def check(
        self,
        suite: str,
        seed: Optional[int] = None,
        size: Optional[int] = None,
        command: Sequence[str] = (),
    ) -> Report:
        """Run a check suite; seed and size default to the configuration."""
        seed = self.config.seed if seed is None else seed
        size = self.config.check_size if size is None else size
        results = run_suite(suite, seed, size, self.config)
        return Report(list(command), results, {"suite": suite, "size": size}, seed=seed)
