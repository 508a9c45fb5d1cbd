"""Monte Carlo oracles: truncated KL paths, empirical plan distortion and small balls."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Union

import numpy as np
import structlog

from .allocation import allocate, materialize_plan, plan_distortion
from .errors import BiasBudgetError, InvalidParameterError, RareEventError
from .models import (
    EstimateCI,
    PathSampleBatch,
    ProductPlan,
    ScalarQuantizer,
    SmallBallEstimate,
    VectorQuantizer,
)
from .scalar_quantizer import ScalarQuantizerCache, quantize_scalar
from .spectra import TAIL_J_MAX, SpectrumModel
from .streams import map_blocks, normals
from .vector_quantizer import VectorQuantizerCache, quantize_vectors

log = structlog.get_logger(__name__)

STREAM_PATHS = 31
STREAM_SMALL_BALL = 32

MIN_HITS = 50
SMALL_BALL_BIAS = 1e-3
BLOCK_ELEMENTS = 1 << 22
PILOT_TRUNCATION = 256


def required_truncation(
    model: SpectrumModel, budget: float, j_max: int = TAIL_J_MAX
) -> Optional[int]:
    """Smallest J with tail(J) <= budget, or None when it exceeds ``j_max``."""

    if model.tail(0).value <= budget:
        return 0
    if model.support is not None:
        j_max = min(j_max, model.support)
    if model.tail(j_max).value > budget:
        return None
    lo, hi = 0, 1
    while model.tail(hi).value > budget:
        lo, hi = hi, min(hi * 2, j_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if model.tail(mid).value > budget:
            lo = mid
        else:
            hi = mid
    return hi


def _rows_per_block(width: int, block_size: int) -> int:
    return max(1, min(block_size, BLOCK_ELEMENTS // max(width, 1)))


def sample_paths(
    model: SpectrumModel,
    J: Optional[int] = None,
    count: int = 10_000,
    seed: int = 0,
    bias_budget: float = 1e-6,
    j_max: int = TAIL_J_MAX,
    block_size: int = 65_536,
    workers: int = 1,
) -> PathSampleBatch:
    """KL coefficients lambda_j^(1/2) Z_j, j <= J, for ``count`` independent paths.

    ``bias_budget`` is relative to the trace; the omitted energy tail(J) must not exceed it.
    """

    if count < 1:
        raise InvalidParameterError(f"count must be >= 1, got {count}")
    budget = bias_budget * model.tail(0).value
    if J is None:
        J = required_truncation(model, budget, j_max)
        if J is None:
            raise BiasBudgetError(
                f"bias budget {bias_budget:g} x trace not reachable within J_max={j_max}", None
            )
    if J < 1:
        raise InvalidParameterError(f"truncation must be >= 1, got {J}")
    bias = model.tail(J).value
    if bias > budget:
        raise BiasBudgetError(
            f"truncation J={J} leaves tail energy {bias:.3e} above the budget {budget:.3e}",
            required_truncation(model, budget, j_max),
        )

    eigs = model.eigenvalues(J)
    if eigs.size < J:
        eigs = np.concatenate((eigs, np.zeros(J - eigs.size)))
    scale = np.sqrt(eigs)
    rows = _rows_per_block(J, block_size)

    def block(index: int, size: int) -> np.ndarray:
        return scale * normals(seed, index, (size, J), stream=STREAM_PATHS)

    coefficients = np.concatenate(map_blocks(block, count, rows, workers), axis=0)
    log.debug("paths_sampled", count=count, truncation=J, bias=bias, seed=seed)
    return PathSampleBatch(
        coefficients=coefficients, eigenvalues=eigs, seed=seed, truncation_bias=bias
    )


def _block_errors(
    coefficients: np.ndarray,
    eigs: np.ndarray,
    plan: ProductPlan,
    quantizers: Sequence[Union[ScalarQuantizer, VectorQuantizer]],
) -> np.ndarray:
    d = plan.block_dim
    kept = plan.m * d
    err = np.zeros(coefficients.shape[0])
    for j, quantizer in enumerate(quantizers):
        cols = slice(j * d, (j + 1) * d)
        nu = eigs[j * d]
        # every coordinate of block j is scaled by nu_j = lambda_{(j-1)d+1}
        z = coefficients[:, cols] / math.sqrt(nu)
        if d == 1:
            diff = z[:, 0] - quantize_scalar(quantizer, z[:, 0])
            err += nu * diff * diff
        else:
            _, sq = quantize_vectors(quantizer, z)
            err += nu * sq
    if coefficients.shape[1] > kept:
        err += np.sum(np.square(coefficients[:, kept:]), axis=1)
    return err


def empirical_distortion(
    plan: ProductPlan,
    batch: PathSampleBatch,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    vq_cache: Optional[VectorQuantizerCache] = None,
    block_size: int = 65_536,
    workers: int = 1,
) -> EstimateCI:
    """Monte Carlo E||X - f(X)||^2 for the plan's product quantizer."""

    kept = plan.m * plan.block_dim
    if batch.truncation < kept:
        raise InvalidParameterError(
            f"truncation J={batch.truncation} is below the plan's m*d={kept} coordinates"
        )
    quantizers = materialize_plan(plan, scalar_cache, vq_cache)
    rows = _rows_per_block(batch.truncation, block_size)

    def block(index: int, size: int) -> np.ndarray:
        start = index * rows
        chunk = batch.coefficients[start : start + size]
        return _block_errors(chunk, batch.eigenvalues, plan, quantizers)

    errors = np.concatenate(map_blocks(block, batch.count, rows, workers))
    estimate = EstimateCI.from_samples(errors + batch.truncation_bias, batch.seed)
    log.debug("empirical_distortion", value=estimate.value, stderr=estimate.stderr, m=plan.m)
    return estimate


def _squared_norms(
    model: SpectrumModel,
    J: int,
    count: int,
    seed: int,
    block_size: int,
    workers: int,
) -> np.ndarray:
    eigs = model.eigenvalues(J)
    rows = _rows_per_block(eigs.size, block_size)

    def block(index: int, size: int) -> np.ndarray:
        z = normals(seed, index, (size, eigs.size), stream=STREAM_SMALL_BALL)
        return np.square(z) @ eigs

    return np.concatenate(map_blocks(block, count, rows, workers))


def _small_ball_truncation(model: SpectrumModel, eps: float, J: Optional[int], j_max: int) -> int:
    budget = eps * eps * SMALL_BALL_BIAS
    if J is None:
        J = required_truncation(model, budget, j_max)
        if J is None:
            raise BiasBudgetError(f"no truncation keeps the omitted energy below {budget:.3e}", None)
        return max(J, 1)
    if model.tail(J).value > budget:
        raise BiasBudgetError(
            f"truncation J={J} omits more than {SMALL_BALL_BIAS:g} eps^2",
            required_truncation(model, budget, j_max),
        )
    return J


def _feasible_eps(norms: np.ndarray) -> float:
    ordered = np.sort(norms)
    return float(math.sqrt(ordered[min(MIN_HITS, ordered.size) - 1]))


def small_ball(
    model: SpectrumModel,
    eps: float,
    J: Optional[int] = None,
    count: int = 100_000,
    seed: int = 0,
    j_max: int = TAIL_J_MAX,
    block_size: int = 65_536,
    workers: int = 1,
) -> SmallBallEstimate:
    """-log P(||X|| <= eps) by plain counting, with a delta-method stderr."""

    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    J = _small_ball_truncation(model, eps, J, j_max)
    norms = _squared_norms(model, J, count, seed, block_size, workers)
    hits = int(np.count_nonzero(norms <= eps * eps))
    if hits < MIN_HITS:
        raise RareEventError(
            f"only {hits} of {count} paths fell in the ball of radius {eps:g}",
            _feasible_eps(norms),
        )
    p = hits / count
    stderr = math.sqrt((1.0 - p) / (count * p))
    return SmallBallEstimate(
        eps=eps,
        value=-math.log(p),
        stderr=stderr,
        probability=p,
        hits=hits,
        samples=count,
        seed=seed,
        truncation=J,
        truncation_bias=model.tail(J).value,
    )


def small_ball_inverse(
    model: SpectrumModel,
    level: float,
    J: Optional[int] = None,
    count: int = 100_000,
    seed: int = 0,
    j_max: int = TAIL_J_MAX,
    block_size: int = 65_536,
    workers: int = 1,
) -> EstimateCI:
    """Empirical F^-1(level): the exp(-level) quantile of ||X||.

    Without an explicit J a pilot run sizes the truncation from the pilot quantile.
    """

    if level < 0:
        raise InvalidParameterError(f"level must be >= 0, got {level}")
    q = math.exp(-level)
    if q * count < MIN_HITS:
        pilot = _squared_norms(model, PILOT_TRUNCATION, count, seed, block_size, workers)
        raise RareEventError(
            f"quantile {q:.3e} needs more than {count} samples",
            _feasible_eps(pilot),
        )
    if J is None:
        pilot = _squared_norms(model, PILOT_TRUNCATION, min(count, 20_000), seed, block_size, workers)
        radius = math.sqrt(float(np.quantile(pilot, min(q, 1.0))))
        J = _small_ball_truncation(model, radius, None, j_max)
    norms = np.sort(_squared_norms(model, J, count, seed, block_size, workers))

    def order_stat(prob: float) -> float:
        idx = min(max(int(math.ceil(prob * count)) - 1, 0), count - 1)
        return math.sqrt(float(norms[idx]))

    spread = math.sqrt(q * (1.0 - q) / count)
    value = order_stat(q)
    stderr = 0.5 * (order_stat(min(q + spread, 1.0)) - order_stat(max(q - spread, 0.0)))
    return EstimateCI(value=value, stderr=stderr, samples=count, seed=seed)


def small_ball_lower_check(
    model: SpectrumModel,
    log_n_grid: Sequence[float],
    c: float = 0.5,
    count: int = 100_000,
    seed: int = 0,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    workers: int = 1,
) -> List[dict]:
    """Compare the scalar plan error with the small-ball lower bound c F^-1(log(n/(1-c^2)))."""

    if not 0 < c < 1:
        raise InvalidParameterError(f"c must lie in (0, 1), got {c}")
    rows = []
    for log_n in log_n_grid:
        plan = allocate(model, log_n=log_n, d=1)
        plan_error = math.sqrt(plan_distortion(plan, model, scalar_cache).total)
        inverse = small_ball_inverse(
            model, log_n - math.log1p(-c * c), count=count, seed=seed, workers=workers
        )
        bound = c * inverse.value
        rows.append(
            {
                "log_n": log_n,
                "plan_error": plan_error,
                "small_ball_inverse": inverse.value,
                "stderr": inverse.stderr,
                "lower_bound": bound,
                "holds": plan_error >= bound - 4.0 * c * inverse.stderr,
            }
        )
    return rows
