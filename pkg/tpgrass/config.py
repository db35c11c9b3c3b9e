"""Configuration helpers."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .exceptions import ConfigurationError, InvalidArgumentsError

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ToolConfig:
    """Configuration shared by the CLI, the HTTP API and the service layer."""

    output_dir: Optional[Path] = None
    tolerance: float = DEFAULT_TOLERANCE
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.tolerance < 0:
            raise ConfigurationError("tolerance must be nonnegative")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")

    @staticmethod
    def default() -> "ToolConfig":
        """Return a configuration with the built-in defaults."""
        return ToolConfig()


@dataclass(frozen=True)
class FlowConfig:
    """Runtime parameters of the flow g_r = exp(rA) and its path checks."""

    r_step: float = 0.1
    epsilon: float = 1e-9
    n_max: int = 200
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        if not self.r_step > 0:
            raise InvalidArgumentsError(f"r_step must be positive, got {self.r_step}")
        if not self.epsilon > 0:
            raise InvalidArgumentsError(f"epsilon must be positive, got {self.epsilon}")
        if self.n_max < 1:
            raise InvalidArgumentsError(f"n_max must be at least 1, got {self.n_max}")
        if self.tolerance < 0:
            raise InvalidArgumentsError(f"tolerance must be nonnegative, got {self.tolerance}")


def _parse_float(name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}") from exc


def _parse_int(name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from exc


def load_config() -> ToolConfig:
    """Load configuration from environment variables."""
    output_dir = os.environ.get("TPGRASS_OUTPUT_DIR")
    tolerance = os.environ.get("TPGRASS_TOLERANCE")
    jobs = os.environ.get("TPGRASS_JOBS")

    defaults = ToolConfig.default()
    return ToolConfig(
        output_dir=Path(output_dir).expanduser() if output_dir else defaults.output_dir,
        tolerance=_parse_float("TPGRASS_TOLERANCE", tolerance) if tolerance else defaults.tolerance,
        jobs=_parse_int("TPGRASS_JOBS", jobs) if jobs else defaults.jobs,
    )
