"""Water-filling for the Gaussian epsilon-entropy and its companions."""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
import structlog
from scipy.optimize import brentq

from .allocation import allocate, plan_distortion
from .errors import InvalidParameterError
from .models import EstimateCI, NEpsBracket, ReproducingSample, WaterfillSolution
from .scalar_quantizer import ScalarQuantizerCache
from .spectra import SpectrumModel
from .streams import normals

log = structlog.get_logger(__name__)

STREAM_REPRO_X = 21
STREAM_REPRO_Y = 22
DESK_LOG_N = 60.0
ESTIMATE_LOG_N = 1e5


def _flood_level(model: SpectrumModel, k: int) -> float:
    """tail(k) + k lambda_k, nonincreasing in k."""

    return model.tail(k).value + k * model.eigenvalue(k)


def _scan_r(model: SpectrumModel, dist: float) -> int:
    """Largest k with tail(k) + k lambda_k > dist (strict)."""

    cap = model.support
    lo, hi = 1, 2
    while cap is None or hi <= cap:
        if _flood_level(model, hi) <= dist:
            break
        lo, hi = hi, hi * 2
    else:
        hi = cap + 1
    # invariant: level(lo) > dist >= level(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _flood_level(model, mid) > dist:
            lo = mid
        else:
            hi = mid
    if not _flood_level(model, lo) > dist or _flood_level(model, lo + 1) > dist:
        log.warning("flood_scan_nonmonotone", dist=dist)
        lo = 1
        while _flood_level(model, lo + 1) > dist:
            lo += 1
    return lo


def flood(model: SpectrumModel, distortion: float) -> WaterfillSolution:
    """Water-filling parametrised by the squared distortion eps^2."""

    if not distortion > 0 or not math.isfinite(distortion):
        raise InvalidParameterError(
            f"distortion must be positive and finite, got {distortion} (R is infinite at 0)"
        )
    eps = math.sqrt(distortion)
    trace = model.tail(0)
    if distortion >= trace.value:
        return WaterfillSolution(eps=eps, r=None, theta=None, rate=0.0)

    r = _scan_r(model, distortion)
    tail = model.tail(r)
    theta = (distortion - tail.value) / r
    lam = model.eigenvalues(r)
    rate = 0.5 * math.fsum((np.log(lam) - math.log(theta)).tolist())
    error = 0.5 * tail.bound / theta if tail.bound else 0.0
    return WaterfillSolution(eps=eps, r=r, theta=theta, rate=rate, error_bound=error)


def waterfill(model: SpectrumModel, eps: float) -> WaterfillSolution:
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps} (R is infinite at 0)")
    solution = flood(model, eps * eps)
    return WaterfillSolution(
        eps=eps,
        r=solution.r,
        theta=solution.theta,
        rate=solution.rate,
        error_bound=solution.error_bound,
    )


def distortion_rate(model: SpectrumModel, rate: float) -> float:
    """The eps whose epsilon-entropy equals ``rate`` (nats)."""

    if rate < 0 or not math.isfinite(rate):
        raise InvalidParameterError(f"rate must be finite and >= 0, got {rate}")
    trace = model.tail(0).value
    if rate == 0:
        return math.sqrt(trace)

    def gap(log_dist: float) -> float:
        return flood(model, math.exp(log_dist)).rate - rate

    upper = math.log(trace)
    lower = upper - 1.0
    while gap(lower) <= 0:
        lower -= 2.0 * (upper - lower)
    log_dist = brentq(gap, lower, upper, xtol=1e-15, rtol=4.5 * np.finfo(float).eps, maxiter=500)
    return math.exp(0.5 * log_dist)


def rd_asymptotic(c: float, b: float, a: float, eps: float) -> float:
    """Closed-form eps-entropy for lambda_j ~ c j^-b (log j)^-a as eps -> 0."""

    if b <= 1:
        raise InvalidParameterError(f"rd_asymptotic needs b > 1, got {b}")
    if not 0 < eps < 1:
        raise InvalidParameterError(f"eps must lie in (0, 1), got {eps}")
    inner = c * b / (b - 1.0) * ((b - 1.0) / 2.0) ** a
    return (
        (b / 2.0)
        * inner ** (1.0 / (b - 1.0))
        * eps ** (-2.0 / (b - 1.0))
        * math.log(1.0 / eps) ** (-a / (b - 1.0))
    )


def sample_reproducing(
    model: SpectrumModel, eps: float, count: int, seed: int = 0
) -> ReproducingSample:
    """Paired coordinates (X_j, Y_j), j <= r, with Y drawn from the reproducing distribution."""

    solution = waterfill(model, eps)
    if solution.zero_rate:
        raise InvalidParameterError(f"eps={eps} is at or above e_1; the reproduction is constant")
    if count < 2:
        raise InvalidParameterError(f"count must be >= 2, got {count}")
    r, theta = solution.r, solution.theta
    lam = model.eigenvalues(r)
    shrink = 1.0 - theta / lam
    z = normals(seed, 0, (count, r), stream=STREAM_REPRO_X)
    z2 = normals(seed, 0, (count, r), stream=STREAM_REPRO_Y)
    x = np.sqrt(lam) * z
    y = np.sqrt(lam) * shrink * z + np.sqrt(theta * shrink) * z2
    return ReproducingSample(
        x=x, y=y, solution=solution, seed=seed, omitted_energy=model.tail(r).value
    )


def reproducing_gap(sample: ReproducingSample) -> EstimateCI:
    """Monte Carlo E||X - Y||^2, with the energy beyond r added analytically."""

    per_row = np.sum(np.square(sample.x - sample.y), axis=1) + sample.omitted_energy
    return EstimateCI.from_samples(per_row, sample.seed)


def _first_budget(accepts: Callable[[int], bool], limit: int) -> Optional[int]:
    """Smallest integer n <= limit with accepts(n), assuming accepts is monotone."""

    if accepts(1):
        return 1
    lo, hi = 1, 2
    while not accepts(hi):
        if hi >= limit:
            return None
        lo, hi = hi, min(hi * 2, limit)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if accepts(mid):
            hi = mid
        else:
            lo = mid
    return hi


def n_eps_bracket(
    model: SpectrumModel,
    eps: float,
    scalar_cache: Optional[ScalarQuantizerCache] = None,
    max_log_n: float = DESK_LOG_N,
) -> NEpsBracket:
    """exp(R(eps)) <= N(eps) <= smallest scalar-plan budget reaching eps^2."""

    target = eps * eps
    solution = waterfill(model, eps)
    if solution.zero_rate:
        return NEpsBracket(eps=eps, log_lower=0.0, log_upper=0.0, n_upper=1, materialized=True)

    def accepts(n: int) -> bool:
        plan = allocate(model, d=1, n=n)
        return plan_distortion(plan, model, scalar_cache).total <= target

    n_upper = _first_budget(accepts, int(math.exp(max_log_n)))
    if n_upper is not None:
        return NEpsBracket(
            eps=eps,
            log_lower=solution.rate,
            log_upper=math.log(n_upper),
            n_upper=n_upper,
            materialized=True,
        )

    def gap(log_n: float) -> float:
        plan = allocate(model, log_n=log_n, d=1)
        return plan_distortion(plan, model, scalar_cache).total - target

    log.info("n_eps_not_materialized", eps=eps, max_log_n=max_log_n)
    log_upper = brentq(gap, max_log_n, ESTIMATE_LOG_N, xtol=1e-6)
    return NEpsBracket(
        eps=eps,
        log_lower=solution.rate,
        log_upper=float(log_upper),
        n_upper=None,
        materialized=False,
    )
