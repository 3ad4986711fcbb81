"""Check results and command reports."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

SCHEMA_VERSION = 1


class Status(str, Enum):
    """Outcome of a single check."""

    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"


@dataclass
class CheckResult:
    """One named check with its measured values.

    Attributes:
        name: Check name, stable across runs.
        status: Pass, fail or not-applicable.
        measured: Measured values (JSON-serializable).
        tolerance: Tolerance the check was judged against, if any.
        runtime_s: Wall-clock runtime in seconds.
        details: Free-form explanation shown in tables.
    """

    name: str
    status: Status
    measured: dict[str, Any] = field(default_factory=dict)
    tolerance: float | None = None
    runtime_s: float = 0.0
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status is not Status.FAIL

    def to_dict(self, include_runtime: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "name": self.name,
            "status": self.status.value,
            "measured": _jsonable(self.measured),
            "tolerance": self.tolerance,
        }
        if self.details:
            data["details"] = self.details
        if include_runtime:
            data["runtime_s"] = round(self.runtime_s, 6)
        return data


@dataclass
class Report:
    """Everything a CLI command prints.

    Exit code is 0 iff no check failed.
    """

    command: list[str]
    checks: list[CheckResult] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self, include_runtime: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {"schema": SCHEMA_VERSION, "command": list(self.command)}
        if self.seed is not None:
            data["seed"] = self.seed
        if self.values:
            data["values"] = _jsonable(self.values)
        data["checks"] = [c.to_dict(include_runtime) for c in self.checks]
        data["ok"] = self.ok
        return data

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2, sort_keys=True)


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON values."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    return value
