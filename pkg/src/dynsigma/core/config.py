import os
import time
from dataclasses import dataclass, replace
from typing import Optional

from dynsigma.core.errors import ConfigError

VALID_FORMATS = {"text", "structured"}
VALID_TIERS = {"fast", "slow"}

DEFAULT_MAX_S_PAIRS = 500_000
DEFAULT_MAX_COEFF_BITS = 1 << 20
DEFAULT_TIME_LIMIT_SECONDS = 7200.0


@dataclass(frozen=True)
class GroebnerLimits:
    max_pairs: Optional[int] = None
    max_coeff_bits: Optional[int] = None
    time_limit: Optional[float] = None
    # time.monotonic() value; every computation of one job stops at the same instant
    deadline: Optional[float] = None

    def started(self) -> "GroebnerLimits":
        if not self.time_limit or self.deadline is not None:
            return self
        return replace(self, deadline=time.monotonic() + self.time_limit)


@dataclass(frozen=True)
class AppConfig:
    name_app: str
    run_environment: str
    path_to_logs: Optional[str]
    path_results: Optional[str]
    max_s_pairs: int
    max_coeff_bits: int
    time_limit_seconds: float
    output_format: str
    tier: str
    max_workers: int


@dataclass(frozen=True)
class JobConfig:
    command: str
    max_s_pairs: int
    max_coeff_bits: int
    time_limit_seconds: float
    output_format: str
    tier: str
    workers: int
    output_path: Optional[str] = None
    name_app: str = "dynsigma"

    def __post_init__(self) -> None:
        if self.max_s_pairs <= 0:
            raise ConfigError("max S-pair cap must be positive")
        if self.max_coeff_bits <= 0:
            raise ConfigError("max coefficient bit cap must be positive")
        if self.time_limit_seconds <= 0:
            raise ConfigError("time limit must be positive")
        if self.workers <= 0:
            raise ConfigError("worker count must be positive")
        if self.output_format not in VALID_FORMATS:
            raise ConfigError(f"Invalid output format: {self.output_format}")
        if self.tier not in VALID_TIERS:
            raise ConfigError(f"Invalid tier: {self.tier}")

    def limits(self) -> GroebnerLimits:
        """Caps for one job; the time limit counts from this call."""
        return GroebnerLimits(
            max_pairs=self.max_s_pairs,
            max_coeff_bits=self.max_coeff_bits,
            time_limit=self.time_limit_seconds,
        ).started()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"Environment variable {name} must be an integer, got {raw!r}") from exc


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"Environment variable {name} must be a number, got {raw!r}") from exc


def load_config() -> AppConfig:
    return AppConfig(
        name_app=os.getenv("NAME_APP", ""),
        run_environment=os.getenv("RUN_ENVIRONMENT", ""),
        path_to_logs=os.getenv("PATH_TO_LOGS"),
        path_results=os.getenv("PATH_RESULTS"),
        max_s_pairs=_int_env("MAX_S_PAIRS", DEFAULT_MAX_S_PAIRS),
        max_coeff_bits=_int_env("MAX_COEFF_BITS", DEFAULT_MAX_COEFF_BITS),
        time_limit_seconds=_float_env("TIME_LIMIT_SECONDS", DEFAULT_TIME_LIMIT_SECONDS),
        output_format=os.getenv("OUTPUT_FORMAT", "text"),
        tier=os.getenv("TIER", "fast"),
        max_workers=_int_env("MAX_WORKERS", 1),
    )


def build_job_config(
    config: AppConfig,
    command: str,
    max_pairs: Optional[int] = None,
    max_coeff_bits: Optional[int] = None,
    time_limit: Optional[float] = None,
    output_format: Optional[str] = None,
    tier: Optional[str] = None,
    workers: Optional[int] = None,
    output_path: Optional[str] = None,
) -> JobConfig:
    return JobConfig(
        command=command,
        max_s_pairs=max_pairs if max_pairs is not None else config.max_s_pairs,
        max_coeff_bits=max_coeff_bits if max_coeff_bits is not None else config.max_coeff_bits,
        time_limit_seconds=time_limit if time_limit is not None else config.time_limit_seconds,
        output_format=output_format or config.output_format,
        tier=tier or config.tier,
        workers=workers if workers is not None else config.max_workers,
        output_path=output_path,
        name_app=config.name_app or "dynsigma",
    )
