"""Shared result models for quantizers, plans and estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameterError

EXACT = "exact"
APPROXIMATE_UPPER = "approximate-upper"


@dataclass(frozen=True)
class EstimateCI:
    value: float
    stderr: float
    samples: int
    seed: int

    def covers(self, target: float, width: float = 4.0) -> bool:
        return abs(self.value - target) <= width * self.stderr

    @classmethod
    def from_samples(cls, values: np.ndarray, seed: int) -> "EstimateCI":
        n = int(values.size)
        stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(value=float(values.mean()), stderr=stderr, samples=n, seed=seed)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class ScalarQuantizer:
    """Stationary k-level quantizer for N(0, 1)."""

    levels: int
    codepoints: np.ndarray
    thresholds: np.ndarray
    masses: np.ndarray
    distortion: float
    stationarity_residual: float
    iterations: int = 0

    @property
    def identity_distortion(self) -> float:
        """1 - sum p_i a_i^2, exact for centroidal quantizers of a unit-variance law."""
        return 1.0 - math.fsum((self.masses * self.codepoints**2).tolist())

    def as_dict(self) -> dict:
        return {
            "levels": self.levels,
            "codepoints": self.codepoints.tolist(),
            "thresholds": self.thresholds[1:-1].tolist(),
            "distortion": self.distortion,
            "stationarity_residual": self.stationarity_residual,
        }


@dataclass(frozen=True)
class ScanRow:
    """One row of a k^{2/d} e_k^2 table with its running supremum."""

    k: int
    value: float
    running_sup: float
    stderr: float = 0.0
    valid: bool = True
    error: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "value": self.value,
            "running_sup": self.running_sup,
            "stderr": self.stderr,
            "valid": self.valid,
            "error": self.error,
        }


@dataclass(frozen=True, eq=False)
class VectorQuantizer:
    dim: int
    levels: int
    codepoints: np.ndarray
    distortion_estimate: EstimateCI
    training_seed: int
    reseeded_cells: int = 0

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "levels": self.levels,
            "codepoints": self.codepoints.tolist(),
            "distortion_estimate": self.distortion_estimate.as_dict(),
            "training_seed": self.training_seed,
            "reseeded_cells": self.reseeded_cells,
        }


@dataclass(frozen=True)
class TailSum:
    """Sum of eigenvalues beyond an index, with a rigorous absolute error bound."""

    value: float
    bound: float = 0.0


@dataclass(frozen=True, eq=False)
class EigenSequence:
    values: np.ndarray
    method: str  # exact | asymptotic | nystrom


@dataclass(frozen=True, eq=False)
class PlanDistortion:
    tail: float
    quant: float
    stderr: float = 0.0
    exactness: str = EXACT

    @property
    def total(self) -> float:
        return self.tail + self.quant

    def as_dict(self) -> dict:
        return {
            "tail": self.tail,
            "quant": self.quant,
            "total": self.total,
            "stderr": self.stderr,
            "exactness": self.exactness,
        }


@dataclass(frozen=True, eq=False)
class ProductPlan:
    log_n: float
    block_dim: int
    m: int
    levels: np.ndarray
    block_eigs: np.ndarray
    n: Optional[int] = None
    exactness: str = EXACT
    distortion: Optional[PlanDistortion] = None

    @property
    def log_budget_used(self) -> float:
        return math.fsum(np.log(self.levels).tolist())

    def as_dict(self, with_levels: bool = True) -> dict:
        data: dict = {
            "log_n": self.log_n,
            "n": self.n,
            "block_dim": self.block_dim,
            "m": self.m,
            "log_budget_used": self.log_budget_used,
            "exactness": self.exactness,
        }
        if with_levels:
            data["levels"] = [int(v) for v in self.levels]
        if self.distortion is not None:
            data["distortion"] = self.distortion.as_dict()
        return data


@dataclass(frozen=True)
class WaterfillSolution:
    eps: float
    r: Optional[int]
    theta: Optional[float]
    rate: float
    error_bound: float = 0.0

    @property
    def zero_rate(self) -> bool:
        return self.r is None

    def as_dict(self) -> dict:
        return {"eps": self.eps, "r": self.r, "theta": self.theta, "R": self.rate}


@dataclass(frozen=True)
class SharpLaw:
    """Predicted sharp asymptotics e_n ~ K * rate(log n)."""

    kind: str  # index_b | index_minus_one
    c: float
    b: float
    a: float
    constant: float
    scalar_ratio_bound: float
    log_power: float = field(default=0.0)
    loglog_power: float = field(default=0.0)

    def rate(self, log_n: float) -> float:
        if log_n <= 0.0:
            raise InvalidParameterError(f"log n must be positive, got {log_n}")
        value = log_n**self.log_power
        if self.loglog_power == 0.0:
            return value
        if log_n <= 1.0:
            raise InvalidParameterError(f"log n must exceed 1 for log log n terms, got {log_n}")
        return value * math.log(log_n) ** self.loglog_power

    def predicted(self, log_n: float) -> float:
        return self.constant * self.rate(log_n)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "c": self.c,
            "b": self.b,
            "a": self.a,
            "K": self.constant,
            "log_n_exponent": self.log_power,
            "loglog_n_exponent": self.loglog_power,
            "scalar_ratio_bound": self.scalar_ratio_bound,
        }


@dataclass(frozen=True, eq=False)
class PathSampleBatch:
    coefficients: np.ndarray
    eigenvalues: np.ndarray
    seed: int
    truncation_bias: float

    @property
    def truncation(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def count(self) -> int:
        return int(self.coefficients.shape[0])


@dataclass(frozen=True, eq=False)
class ReproducingSample:
    x: np.ndarray
    y: np.ndarray
    solution: WaterfillSolution
    seed: int
    omitted_energy: float


@dataclass(frozen=True)
class SmallBallEstimate:
    eps: float
    value: float
    stderr: float
    probability: float
    hits: int
    samples: int
    seed: int
    truncation: int
    truncation_bias: float
    bias_direction: str = "F underestimated (truncated norm <= full norm)"

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "F": self.value,
            "stderr": self.stderr,
            "probability": self.probability,
            "hits": self.hits,
            "samples": self.samples,
            "seed": self.seed,
            "truncation": self.truncation,
            "truncation_bias": self.truncation_bias,
            "bias_direction": self.bias_direction,
        }


@dataclass(frozen=True)
class NEpsBracket:
    eps: float
    log_lower: float
    log_upper: float
    n_upper: Optional[int]
    materialized: bool

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "log_lower": self.log_lower,
            "log_upper": self.log_upper,
            "n_upper": self.n_upper,
            "materialized": self.materialized,
        }
