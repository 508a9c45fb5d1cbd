"""Level allocation for product quantizers and the bound pair that brackets e_n."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Dict, List, Optional, Union

import numpy as np
import structlog

from .errors import InvalidParameterError
from .models import (
    APPROXIMATE_UPPER,
    EXACT,
    PlanDistortion,
    ProductPlan,
    ScalarQuantizer,
    VectorQuantizer,
)
from .scalar_quantizer import LIMIT_C1, ScalarQuantizerCache, default_cache
from .spectra import SpectrumModel
from .vector_quantizer import VectorQuantizerCache

log = structlog.get_logger(__name__)

TIE_RTOL = 1e-12
FLOOR_NUDGE = 1e-12


def _check_block(d: int) -> None:
    if d < 1:
        raise InvalidParameterError(f"block dimension must be >= 1, got {d}")


def _block_cap(model: SpectrumModel, d: int) -> Optional[int]:
    if model.support is None:
        return None
    return -(-model.support // d)


def block_log_eigs(model: SpectrumModel, count: int, d: int = 1) -> np.ndarray:
    """log nu_j for j = 1..count, nu_j = lambda_{(j-1)d+1}."""

    idx = np.arange(count, dtype=np.float64) * d + 1.0
    return np.log(model.values_at(idx))


def _a_values(log_nu: np.ndarray, d: int) -> np.ndarray:
    k = np.arange(1, log_nu.size + 1, dtype=np.float64)
    return 0.5 * d * (np.cumsum(log_nu) - k * log_nu)


def a_k(model: SpectrumModel, k: int, d: int = 1) -> float:
    """(d/2) sum_{j<=k} log(nu_j / nu_k), in nats."""

    _check_block(d)
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    return float(_a_values(block_log_eigs(model, k, d), d)[-1])


def critical_dim(model: SpectrumModel, log_n: float, d: int = 1) -> int:
    """Largest k with a_k(d) <= log n (ties inclusive)."""

    _check_block(d)
    if log_n < 0:
        raise InvalidParameterError(f"log n must be >= 0, got {log_n}")
    threshold = log_n + TIE_RTOL * max(log_n, 1.0)
    cap = _block_cap(model, d)
    size = 64 if cap is None else min(64, cap)
    while True:
        a = _a_values(block_log_eigs(model, size, d), d)
        if a[-1] > threshold or (cap is not None and size >= cap):
            break
        size = size * 2 if cap is None else min(size * 2, cap)
    return max(1, int(np.searchsorted(a, threshold, side="right")))


def _log_targets(log_nu: np.ndarray, log_n: float, d: int) -> np.ndarray:
    m = log_nu.size
    return log_n / m + 0.5 * d * log_nu - 0.5 * d * math.fsum(log_nu.tolist()) / m


def allocate(
    model: SpectrumModel,
    log_n: Optional[float] = None,
    d: int = 1,
    n: Optional[int] = None,
) -> ProductPlan:
    """Critical dimension and per-block levels n_j = floor(z_j) for a budget n (or log n)."""

    _check_block(d)
    if n is not None:
        if int(n) != n or n < 1:
            raise InvalidParameterError(f"budget n must be a positive integer, got {n}")
        n = int(n)
        log_n = math.log(n)
    if log_n is None:
        raise InvalidParameterError("either n or log_n is required")

    m = critical_dim(model, log_n, d)
    log_nu = block_log_eigs(model, m, d)
    targets = np.exp(_log_targets(log_nu, log_n, d))
    levels = np.floor(targets * (1.0 + FLOOR_NUDGE)).astype(np.int64)
    if not _within_budget(levels, log_n, n):
        levels = np.floor(targets).astype(np.int64)
        if not _within_budget(levels, log_n, n):
            log.warning("allocation_budget_rounding", m=m, log_n=log_n)
            while not _within_budget(levels, log_n, n) and levels[0] > 1:
                levels[int(np.flatnonzero(levels > 1)[-1])] -= 1
    assert levels.min() >= 1, "critical dimension guarantees n_j >= 1"
    assert np.all(np.diff(levels) <= 0), "levels must be nonincreasing"

    return ProductPlan(
        log_n=float(log_n),
        n=n,
        block_dim=d,
        m=m,
        levels=levels,
        block_eigs=np.exp(log_nu),
        exactness=EXACT if d == 1 else APPROXIMATE_UPPER,
    )


def _within_budget(levels: np.ndarray, log_n: float, n: Optional[int]) -> bool:
    if n is not None:
        return math.prod(int(v) for v in levels) <= n
    return math.fsum(np.log(levels).tolist()) <= log_n


def continuous_allocation(eigs: np.ndarray, log_n: float) -> tuple[np.ndarray, float]:
    """Real-valued minimizer z of sum lambda_j z_j^-2 subject to prod z_j = n, and its value."""

    log_l = np.log(np.asarray(eigs, dtype=np.float64))
    m = log_l.size
    z = np.exp(_log_targets(log_l, log_n, 1))
    value = m * math.exp(-2.0 * log_n / m + math.fsum(log_l.tolist()) / m)
    return z, value


def plan_distortion(
    plan: ProductPlan,
    model: SpectrumModel,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    vq_cache: Optional[VectorQuantizerCache] = None,
) -> PlanDistortion:
    """Tail energy plus the eigenvalue-weighted quantizer errors of every block."""

    tail = model.tail(plan.m * plan.block_dim).value
    weights: Dict[int, List[float]] = {}
    for level, nu in zip(plan.levels.tolist(), plan.block_eigs.tolist()):
        weights.setdefault(level, []).append(nu)

    if plan.block_dim == 1:
        cache = scalar_cache or default_cache()
        parts = [math.fsum(nus) * cache.distortion(level) for level, nus in weights.items()]
        return PlanDistortion(tail=tail, quant=math.fsum(parts), exactness=EXACT)

    cache = vq_cache or VectorQuantizerCache()
    parts, variances = [], []
    for level, nus in weights.items():
        est = cache.get(plan.block_dim, level).distortion_estimate
        w = math.fsum(nus)
        parts.append(w * est.value)
        variances.append((w * est.stderr) ** 2)
    return PlanDistortion(
        tail=tail,
        quant=math.fsum(parts),
        stderr=math.sqrt(math.fsum(variances)),
        exactness=APPROXIMATE_UPPER,
    )


def with_distortion(plan: ProductPlan, model: SpectrumModel, **caches) -> ProductPlan:
    return replace(plan, distortion=plan_distortion(plan, model, **caches))


def materialize_plan(
    plan: ProductPlan,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    vq_cache: Optional[VectorQuantizerCache] = None,
    max_levels: int = 2000,
) -> List[Union[ScalarQuantizer, VectorQuantizer]]:
    """Concrete codebook for every block; only offered when every n_j <= max_levels."""

    top = int(plan.levels[0])
    if top > max_levels:
        raise InvalidParameterError(
            f"plan is not materializable: n_1={top} exceeds the codebook bound {max_levels}"
        )
    if plan.block_dim == 1:
        cache = scalar_cache or default_cache()
        return [cache.get(int(level)) for level in plan.levels]
    vcache = vq_cache or VectorQuantizerCache()
    return [vcache.get(plan.block_dim, int(level)) for level in plan.levels]


def upper_bound(model: SpectrumModel, log_n: float, d: int = 1, cd: float = LIMIT_C1) -> float:
    """tail(md) + 4^(1/d) C(d) m nu_m."""

    m = critical_dim(model, log_n, d)
    nu_m = model.eigenvalue((m - 1) * d + 1)
    return model.tail(m * d).value + 4.0 ** (1.0 / d) * cd * m * nu_m


def lower_bound(model: SpectrumModel, log_n: float) -> float:
    """tail(m) + m lambda_{m+1}, a lower bound on e_n^2."""

    m = critical_dim(model, log_n, 1)
    return model.tail(m).value + m * model.eigenvalue(m + 1)


def plan_bounds(
    model: SpectrumModel,
    log_n: float,
    cd: float = LIMIT_C1,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    n: Optional[int] = None,
) -> dict:
    """Lower bound, exact scalar plan distortion and upper bound for one budget."""

    plan = allocate(model, log_n, 1, n=n)
    dist = plan_distortion(plan, model, scalar_cache)
    return {
        "log_n": plan.log_n,
        "m": plan.m,
        "lower": lower_bound(model, plan.log_n),
        "plan": dist.total,
        "upper": upper_bound(model, plan.log_n, 1, cd),
    }
