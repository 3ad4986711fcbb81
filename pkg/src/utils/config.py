"""Configuration management."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, TypeVar

from dotenv import load_dotenv

from ..errors import ConfigError

PROBABILITY_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-8
CLASSICAL_TOLERANCE = 1e-12
DEFAULT_SEED = 20060101
DEFAULT_CHECK_SIZE = 200
DEFAULT_FOLIATION_LIMIT = 24

T = TypeVar("T")


def _env(name: str, convert: Callable[[str], T], default: T) -> T:
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return convert(raw)
    except ValueError:
        kind = "an integer" if convert is int else "a number"
        raise ConfigError(f"{name} must be {kind}, got {raw!r}") from None


@dataclass
class Config:
    """Application configuration."""

    probability_tolerance: float = PROBABILITY_TOLERANCE
    rank_tolerance: float = RANK_TOLERANCE
    classical_tolerance: float = CLASSICAL_TOLERANCE
    seed: int = DEFAULT_SEED
    check_size: int = DEFAULT_CHECK_SIZE
    foliation_limit: int = DEFAULT_FOLIATION_LIMIT
    log_level: str = "WARNING"

    @classmethod
    def load(cls) -> "Config":
        """Load configuration from environment variables.

        Raises:
            ConfigError: If a numeric setting does not parse.
        """
        load_dotenv()

        return cls(
            probability_tolerance=_env("GPT_PROBABILITY_TOLERANCE", float, PROBABILITY_TOLERANCE),
            rank_tolerance=_env("GPT_RANK_TOLERANCE", float, RANK_TOLERANCE),
            classical_tolerance=_env("GPT_CLASSICAL_TOLERANCE", float, CLASSICAL_TOLERANCE),
            seed=_env("GPT_SEED", int, DEFAULT_SEED),
            check_size=_env("GPT_CHECK_SIZE", int, DEFAULT_CHECK_SIZE),
            foliation_limit=_env("GPT_FOLIATION_LIMIT", int, DEFAULT_FOLIATION_LIMIT),
            log_level=os.getenv("GPT_LOG_LEVEL", "WARNING").upper(),
        )

    def validate(self) -> list[str]:
        """Return a list of configuration problems (empty when usable)."""
        problems = []
        for name in ("probability_tolerance", "rank_tolerance", "classical_tolerance"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")
        if self.check_size < 1:
            problems.append("check_size must be at least 1")
        if self.foliation_limit < 1:
            problems.append("foliation_limit must be at least 1")
        return problems
