"""Optimal k-level quantizers for the standard normal law.

The solver works on the nonnegative half-line. For even k the positive codepoints own the
cells above 0; for odd k the middle codepoint is exactly 0 and owns ``[-c_1/2, c_1/2]``.
Cells are integrated in closed form when wide and by Gauss-Legendre when narrow, which
keeps masses and centroids accurate for thousands of levels.
"""

from __future__ import annotations

import math
import threading
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import structlog
from scipy.linalg import solve_banded
from scipy.special import ndtr, ndtri

from .db import CodebookStore
from .errors import ConvergenceError, InvalidParameterError
from .models import ScalarQuantizer, ScanRow

log = structlog.get_logger(__name__)

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
LIMIT_C1 = math.sqrt(3.0) * math.pi / 2.0
NARROW_CELL = 1.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _check_levels(k: int) -> int:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidParameterError(f"level count must be a positive integer, got {k!r}")
    return int(k)


def density(x: np.ndarray) -> np.ndarray:
    return INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def quantile_init(k: int) -> np.ndarray:
    """The i/(k+1) quantiles of N(0, 3), i = 1..k."""

    k = _check_levels(k)
    probs = np.arange(1, k + 1, dtype=np.float64) / (k + 1)
    points = math.sqrt(3.0) * ndtri(probs)
    if k % 2 == 1:
        points[k // 2] = 0.0
    return points


def _cell_moments(lo: np.ndarray, hi: np.ndarray):
    """Mass, first moment and second moment of N(0,1) over [lo, hi] with 0 <= lo < hi <= inf."""

    mass = np.empty_like(lo)
    first = np.empty_like(lo)
    second = np.empty_like(lo)
    width = hi - lo
    narrow = np.isfinite(hi) & (width <= NARROW_CELL)

    if narrow.any():
        half = 0.5 * width[narrow]
        mid = 0.5 * (lo[narrow] + hi[narrow])
        x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        w = half[:, None] * _GL_WEIGHTS[None, :] * density(x)
        mass[narrow] = w.sum(axis=1)
        first[narrow] = (w * x).sum(axis=1)
        second[narrow] = (w * x * x).sum(axis=1)

    wide = ~narrow
    if wide.any():
        a, b = lo[wide], hi[wide]
        pa, pb = density(a), density(b)
        qa, qb = ndtr(-a), ndtr(-b)
        mass[wide] = qa - qb
        first[wide] = pa - pb
        b_finite = np.where(np.isfinite(b), b, 0.0)
        second[wide] = a * pa - b_finite * pb + mass[wide]
    return mass, first, second


class _HalfLine:
    """Cells of the positive codepoints for a fixed level count."""

    def __init__(self, k: int):
        self.k = k
        self.h = k // 2
        self.odd = k % 2 == 1

    def bounds(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mids = 0.5 * (c[:-1] + c[1:])
        first_lo = 0.5 * c[0] if self.odd else 0.0
        lo = np.concatenate(([first_lo], mids))
        hi = np.concatenate((mids, [np.inf]))
        return lo, hi

    def centroids(self, c: np.ndarray):
        lo, hi = self.bounds(c)
        mass, first, _ = _cell_moments(lo, hi)
        return first / mass, mass, lo, hi

    def residual(self, c: np.ndarray) -> float:
        m, _, _, _ = self.centroids(c)
        return float(np.max(np.abs(c - m)))

    def newton_step(self, c: np.ndarray) -> np.ndarray:
        m, mass, lo, hi = self.centroids(c)
        f = c - m
        d_lo = density(lo) * (m - lo) / mass
        hi_finite = np.where(np.isfinite(hi), hi, m)
        d_hi = density(hi_finite) * (hi_finite - m) / mass

        h = self.h
        diag = np.ones(h)
        sub = np.zeros(h)  # d m_i / d c_{i-1}, stored at row i
        sup = np.zeros(h)  # d m_i / d c_{i+1}, stored at row i
        sub[1:] = 0.5 * d_lo[1:]
        diag[1:] -= 0.5 * d_lo[1:]
        if self.odd:
            diag[0] -= 0.5 * d_lo[0]
        sup[:-1] = 0.5 * d_hi[:-1]
        diag[:-1] -= 0.5 * d_hi[:-1]

        ab = np.zeros((3, h))
        ab[0, 1:] = -sup[:-1]
        ab[1] = diag
        ab[2, :-1] = -sub[1:]
        return solve_banded((1, 1), ab, -f)

    def lloyd_pass(self, c: np.ndarray) -> np.ndarray:
        m, _, _, _ = self.centroids(c)
        return m


def _valid(c: np.ndarray) -> bool:
    return bool(c[0] > 0.0 and np.all(np.diff(c) > 0.0) and np.all(np.isfinite(c)))


def _assemble(k: int, c: np.ndarray, iterations: int) -> ScalarQuantizer:
    if k == 1:
        return ScalarQuantizer(
            levels=1,
            codepoints=np.zeros(1),
            thresholds=np.array([-np.inf, np.inf]),
            masses=np.ones(1),
            distortion=1.0,
            stationarity_residual=0.0,
            iterations=iterations,
        )

    half = _HalfLine(k)
    lo, hi = half.bounds(c)
    mass, first, second = _cell_moments(lo, hi)
    residual = float(np.max(np.abs(c - first / mass)))
    cell_err = second - 2.0 * c * first + c * c * mass
    parts = (2.0 * cell_err).tolist()

    if half.odd:
        center_lo, center_hi = np.array([0.0]), np.array([lo[0]])
        c_mass, _, c_second = _cell_moments(center_lo, center_hi)
        parts.append(2.0 * float(c_second[0]))
        codepoints = np.concatenate((-c[::-1], [0.0], c))
        masses = np.concatenate((mass[::-1], 2.0 * c_mass, mass))
    else:
        codepoints = np.concatenate((-c[::-1], c))
        masses = np.concatenate((mass[::-1], mass))

    mids = 0.5 * (codepoints[:-1] + codepoints[1:])
    thresholds = np.concatenate(([-np.inf], mids, [np.inf]))
    return ScalarQuantizer(
        levels=k,
        codepoints=codepoints,
        thresholds=thresholds,
        masses=masses,
        distortion=math.fsum(parts),
        stationarity_residual=residual,
        iterations=iterations,
    )


def from_codepoints(codepoints: List[float]) -> ScalarQuantizer:
    """Rebuild a quantizer (masses, distortion, residual) from stored codepoints."""

    points = np.asarray(codepoints, dtype=np.float64)
    k = _check_levels(points.size)
    return _assemble(k, points[points > 0.0], 0)


def lloyd_1d(
    k: int, tol: float = 1e-12, max_iter: int = 100_000, passes: int = 25
) -> ScalarQuantizer:
    """Stationary symmetric k-level quantizer of N(0,1): Lloyd passes, then damped Newton."""

    k = _check_levels(k)
    if not tol > 0:
        raise InvalidParameterError(f"tolerance must be positive, got {tol!r}")
    if k == 1:
        return _assemble(1, np.empty(0), 0)

    half = _HalfLine(k)
    c = quantile_init(k)[k - half.h :].copy()

    iterations = 0
    for _ in range(min(passes, max_iter)):
        c = half.lloyd_pass(c)
        iterations += 1

    residual = half.residual(c)
    while residual >= tol:
        if iterations >= max_iter:
            raise ConvergenceError(f"lloyd_1d(k={k}) did not converge", residual, iterations)
        iterations += 1
        try:
            step = half.newton_step(c)
        except (ValueError, np.linalg.LinAlgError):
            step = None

        accepted = False
        t = 1.0
        while step is not None and t > 1e-10:
            trial = c + t * step
            if _valid(trial):
                trial_residual = half.residual(trial)
                if trial_residual < residual:
                    c, residual, accepted = trial, trial_residual, True
                    break
            t *= 0.5
        if not accepted:
            c = half.lloyd_pass(c)
            new_residual = half.residual(c)
            if new_residual >= residual and residual < 1e3 * tol:
                # stalled at round-off just above tol
                raise ConvergenceError(f"lloyd_1d(k={k}) stalled", residual, iterations)
            residual = new_residual

    log.debug("lloyd_converged", levels=k, iterations=iterations, residual=residual)
    return _assemble(k, c, iterations)


def quantize_scalar(quantizer: ScalarQuantizer, z: np.ndarray) -> np.ndarray:
    """Nearest codepoint for every entry of ``z``."""

    idx = np.searchsorted(quantizer.thresholds[1:-1], z, side="right")
    return quantizer.codepoints[idx]


class ScalarQuantizerCache:
    """Memoizes solved quantizers by k, optionally backed by a sqlite store."""

    def __init__(
        self,
        max_cached: int = 2000,
        store: Optional[CodebookStore] = None,
        tol: float = 1e-12,
        max_iter: int = 100_000,
        passes: int = 25,
    ):
        self.max_cached = max_cached
        self.store = store
        self.tol = tol
        self.max_iter = max_iter
        self.passes = passes
        self._memo: Dict[int, ScalarQuantizer] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, config) -> "ScalarQuantizerCache":
        store = CodebookStore.in_dir(Path(config.cache_dir)) if config.cache_dir else None
        return cls(
            max_cached=config.scalar_cache_size,
            store=store,
            tol=config.lloyd_tol,
            max_iter=config.lloyd_max_iter,
            passes=config.lloyd_passes,
        )

    def get(self, k: int) -> ScalarQuantizer:
        k = _check_levels(k)
        with self._lock:
            hit = self._memo.get(k)
        if hit is not None:
            return hit

        quantizer = None
        if self.store is not None:
            row = self.store.get(k)
            if row is not None:
                quantizer = from_codepoints(row[0])
        if quantizer is None:
            log.debug("cache_miss", levels=k)
            quantizer = lloyd_1d(k, tol=self.tol, max_iter=self.max_iter, passes=self.passes)
            if self.store is not None:
                self.store.put(
                    k,
                    quantizer.codepoints.tolist(),
                    quantizer.distortion,
                    quantizer.stationarity_residual,
                )
        if k <= self.max_cached:
            with self._lock:
                self._memo[k] = quantizer
        return quantizer

    def distortion(self, k: int) -> float:
        return self.get(k).distortion

    def __len__(self) -> int:
        return len(self._memo)


_default_cache = ScalarQuantizerCache()


def default_cache() -> ScalarQuantizerCache:
    return _default_cache


def set_default_cache(cache: ScalarQuantizerCache) -> None:
    global _default_cache
    _default_cache = cache


def c1_scan(k_max: int, cache: Optional[ScalarQuantizerCache] = None) -> List[ScanRow]:
    """k^2 e_k^2 for k = 1..k_max with its running supremum; failed rows are marked invalid."""

    k_max = _check_levels(k_max)
    cache = cache or default_cache()
    rows: List[ScanRow] = []
    sup = 0.0
    for k in range(1, k_max + 1):
        try:
            value = k * k * cache.distortion(k)
        except ConvergenceError as exc:
            log.warning("scan_row_invalid", levels=k, error=str(exc))
            rows.append(ScanRow(k=k, value=math.nan, running_sup=sup, valid=False, error=str(exc)))
            continue
        sup = max(sup, value)
        rows.append(ScanRow(k=k, value=value, running_sup=sup))
    return rows
