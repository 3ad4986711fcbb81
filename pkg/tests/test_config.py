from __future__ import annotations

import json

import numpy as np
import pytest

from src.errors import ConfigError
from src.report import CheckResult, Report, Status
from src.utils.config import DEFAULT_SEED, Config


def test_defaults(monkeypatch):
    for name in ("GPT_SEED", "GPT_CHECK_SIZE", "GPT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    config = Config.load()
    assert config.seed == DEFAULT_SEED
    assert config.check_size == 200
    assert config.log_level == "WARNING"
    assert config.validate() == []


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("GPT_PROBABILITY_TOLERANCE", "1e-6")
    monkeypatch.setenv("GPT_SEED", "7")
    monkeypatch.setenv("GPT_LOG_LEVEL", "debug")
    config = Config.load()
    assert config.probability_tolerance == 1e-6
    assert config.seed == 7
    assert config.log_level == "DEBUG"


def test_validate_lists_problems():
    config = Config(rank_tolerance=0.0, check_size=0)
    assert config.validate() == [
        "rank_tolerance must be positive",
        "check_size must be at least 1",
    ]


def test_report_json_is_stable():
    checks = [
        CheckResult("a", Status.PASS, {"value": np.float64(0.5)}, 1e-10, runtime_s=0.25),
        CheckResult("b", Status.NOT_APPLICABLE, {"nan": float("nan")}, details="skipped"),
    ]
    report = Report(["check"], checks, {"pair": (1, 2)}, seed=3)
    assert report.ok and report.exit_code == 0
    data = json.loads(report.to_json())
    assert data["schema"] == 1
    assert data["checks"][0] == {"name": "a", "status": "pass", "measured": {"value": 0.5}, "tolerance": 1e-10}
    assert data["checks"][1]["measured"] == {"nan": "nan"}
    assert data["values"] == {"pair": [1, 2]}
    assert json.loads(report.to_json(include_runtime=True))["checks"][0]["runtime_s"] == 0.25


def test_failed_check_sets_exit_code():
    report = Report(["eval"], [CheckResult("p", Status.FAIL)])
    assert not report.ok
    assert report.exit_code == 1


def test_malformed_numbers_raise_config_error(monkeypatch):
    monkeypatch.setenv("GPT_RANK_TOLERANCE", "tiny")
    with pytest.raises(ConfigError, match="GPT_RANK_TOLERANCE must be a number, got 'tiny'"):
        Config.load()
    monkeypatch.delenv("GPT_RANK_TOLERANCE")
    monkeypatch.setenv("GPT_SEED", "1.5")
    with pytest.raises(ConfigError, match="GPT_SEED must be an integer"):
        Config.load()
