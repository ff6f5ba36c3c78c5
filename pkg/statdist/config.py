import math
import os
from collections.abc import Mapping
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional  # to be removed once Pydantic supports Union operator

from dotenv import dotenv_values
from loguru import logger
from pydantic import BaseModel, validator

from statdist import (
    DEFAULT_CHANNELS,
    DEFAULT_COLUMNS,
    DEFAULT_SCHEDULE,
    OPTIMIZER_RESTARTS,
)
from statdist.errors import ConfigError
from statdist.models import MatrixMode
from statdist.utils import parse_floats, parse_ints

# environment variables that may supply defaults
ENV_KEYS = {
    "STATDIST_SEED": "seed",
    "STATDIST_THREADS": "threads",
    "STATDIST_FORMAT": "format",
}


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


class Command(str, Enum):
    dist = "dist"
    count = "count"
    simulate = "simulate"
    hilbert = "hilbert"
    fisher = "fisher"
    channels = "channels"


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI run, embedded in every report"""

    command: Command
    law: str = "cos2"
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    grid: Optional[List[float]] = None
    schedule: List[int] = list(DEFAULT_SCHEDULE)
    seed: int = 0
    threads: int = 1
    format: OutputFormat = OutputFormat.json
    out: Optional[str] = None
    degrees: bool = False

    # simulate
    n: int = 10**4
    theta_true: Optional[float] = None
    replicates: int = 200
    matrix: Optional[MatrixMode] = None
    sheet: Optional[str] = None
    columns: int = DEFAULT_COLUMNS

    # hilbert
    states: Optional[str] = None
    psi1: Optional[str] = None
    psi2: Optional[str] = None
    dim: int = 2
    bases: int = 10
    restarts: int = OPTIMIZER_RESTARTS

    # fisher
    theta: float = 0.7
    deltas: List[float] = [1e-1, 1e-2, 1e-3]

    # channels
    channels: int = DEFAULT_CHANNELS
    lo: float = 0.0
    hi: float = math.pi / 2
    width: Optional[float] = None
    points: int = 100

    class Config:
        extra = "forbid"

    @validator("schedule", pre=True)
    def split_schedule(cls, v):
        return parse_ints(v) if isinstance(v, str) else v

    @validator("grid", "deltas", pre=True)
    def split_floats(cls, v):
        return parse_floats(v) if isinstance(v, str) else v

    @validator("n", pre=True)
    def exponent_n(cls, v):
        return parse_ints(v)[0] if isinstance(v, str) else v

    @validator("seed", "bases")
    def non_negative(cls, v, field):
        if v < 0:
            raise ValueError(f"{field.name} must be >= 0, got {v}")
        return v

    @validator("threads", "replicates", "dim", "restarts", "channels", "points", "columns")
    def positive(cls, v, field):
        if v < 1:
            raise ValueError(f"{field.name} must be >= 1, got {v}")
        return v

    def report_dict(self) -> dict[str, Any]:
        """JSON-ready settings, without the output location"""
        data = self.dict(exclude={"out"})
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data


def _normalize_keys(values: Mapping[str, Any]) -> dict[str, Any]:
    return {key.strip().replace("-", "_"): value for key, value in values.items()}


def env_values() -> dict[str, str]:
    return {key: os.environ[name] for name, key in ENV_KEYS.items() if os.getenv(name)}


def file_values(path: str | Path) -> dict[str, Any]:
    """Flat key=value file, keys mirror the long flag names"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no such file {path}")
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    logger.info(f"Read {len(values)} settings from {path}")
    return _normalize_keys(values)


def resolve(command: str, flags: Mapping[str, Any], config_file: str | None = None) -> RunConfig:
    """Defaults < environment < config file < command-line flags"""
    merged: dict[str, Any] = {"command": command}
    merged.update(env_values())
    if config_file:
        merged.update(file_values(config_file))
    merged.update(_normalize_keys(flags))
    merged["command"] = command
    return RunConfig.parse_obj(merged)
