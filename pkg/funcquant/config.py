"""Configuration management for funcquant."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal, Optional

import yaml
from platformdirs import user_cache_path, user_config_path
from pydantic import BaseModel, Field

APP_NAME = "funcquant"
APP_AUTHOR = "funcquant"


def default_cache_dir() -> Path:
    return user_cache_path(APP_NAME, APP_AUTHOR)


class Config(BaseModel):
    """Runtime configuration values."""

    cache_dir: Optional[Path] = Field(
        default=None, description="Directory for the scalar codebook database (unset = memory only)"
    )
    scalar_cache_size: int = Field(2000, description="Levels k memoized by the scalar cache")
    lloyd_tol: float = Field(1e-12, description="Stationarity residual tolerance")
    lloyd_max_iter: int = Field(100_000, description="Iteration cap for Lloyd/Newton")
    lloyd_passes: int = Field(25, description="Plain Lloyd passes before Newton refinement")
    vq_restarts: int = Field(8, description="k-means restarts for vector codebooks")
    vq_train_samples: int = Field(200_000, description="Training draws per vector codebook")
    vq_eval_samples: int = Field(1_000_000, description="Independent draws for distortion estimates")
    nystrom_grid: int = Field(1000, description="Default midpoint grid for Nystrom")
    mc_samples: int = Field(1_000_000, description="Default Monte Carlo sample count")
    mc_block_size: int = Field(65_536, description="Rows per Monte Carlo block")
    workers: int = Field(1, description="Thread pool size for Monte Carlo blocks")
    bias_budget: float = Field(1e-6, description="Truncation bias budget relative to trace")
    tail_j_max: int = Field(10_000_000, description="Summation limit for tail sums")
    seed: int = Field(0, description="Default seed")
    log_level: str = Field("INFO", description="structlog level")


DEFAULT_CONFIG = Config()


def default_config_path() -> Path:
    base = user_config_path(APP_NAME, APP_AUTHOR)
    return base / "config.yaml"


def load_config(path: Optional[Path] = None) -> Config:
    cfg_path = path or default_config_path()
    if cfg_path.exists():
        with cfg_path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return Config(**data)
    # Fall back to env overrides if present
    overrides: dict = {}
    if "FUNCQUANT_CACHE_DIR" in os.environ:
        overrides["cache_dir"] = Path(os.environ["FUNCQUANT_CACHE_DIR"])
    if "FUNCQUANT_SEED" in os.environ:
        overrides["seed"] = int(os.environ["FUNCQUANT_SEED"])
    if "FUNCQUANT_WORKERS" in os.environ:
        overrides["workers"] = int(os.environ["FUNCQUANT_WORKERS"])
    if "FUNCQUANT_LOG_LEVEL" in os.environ:
        overrides["log_level"] = os.environ["FUNCQUANT_LOG_LEVEL"]
    return Config(**overrides)


def write_default_config(path: Optional[Path] = None) -> Path:
    cfg_path = path or default_config_path()
    cfg_path.parent.mkdir(parents=True, exist_ok=True)
    data = DEFAULT_CONFIG.model_dump()
    data["cache_dir"] = str(default_cache_dir())
    with cfg_path.open("w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=False)
    return cfg_path


class RunConfig(BaseModel):
    """One CLI invocation, enough to reproduce the emitted artifact."""

    subcommand: str
    process: Optional[str] = None
    params: dict = Field(default_factory=dict)
    log_n_grid: Optional[str] = None
    eps_grid: Optional[str] = None
    seed: int = 0
    output_format: Literal["json", "csv"] = "json"
    output: Optional[Path] = None
