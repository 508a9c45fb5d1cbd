"""Trained k-point codebooks for the d-dimensional standard normal law."""

from __future__ import annotations

import math
import threading
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog
from sklearn.cluster import KMeans
from sklearn.metrics import pairwise_distances_argmin_min

from .errors import ConvergenceError, InvalidParameterError
from .models import EstimateCI, ScanRow, VectorQuantizer
from .streams import map_blocks, normals

log = structlog.get_logger(__name__)

STREAM_TRAIN = 11
STREAM_REFINE = 12
STREAM_EVAL = 13

MAX_RESEED_ROUNDS = 3
REFINE_PASSES = 2
EVAL_BLOCK = 65_536


def _check(d: int, k: int) -> None:
    if d < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {d}")
    if k < 1:
        raise InvalidParameterError(f"level count must be >= 1, got {k}")


def _reseed_dead(codebook: np.ndarray, data: np.ndarray) -> Tuple[np.ndarray, int]:
    """Move codepoints with empty cells onto the samples farthest from their centers."""

    labels, dist = pairwise_distances_argmin_min(data, codebook)
    counts = np.bincount(labels, minlength=codebook.shape[0])
    dead = np.flatnonzero(counts == 0)
    if dead.size == 0:
        return codebook, 0
    far = np.argsort(dist)[::-1][: dead.size]
    codebook = codebook.copy()
    codebook[dead] = data[far]
    return codebook, int(dead.size)


def quantize_vectors(
    vq: VectorQuantizer, points: np.ndarray, chunk: int = EVAL_BLOCK
) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest codepoint index and squared distance for every row of ``points``."""

    points = np.asarray(points, dtype=np.float64).reshape(-1, vq.dim)
    labels = np.empty(points.shape[0], dtype=np.int64)
    sq = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        stop = start + chunk
        lab, dist = pairwise_distances_argmin_min(points[start:stop], vq.codepoints)
        labels[start:stop] = lab
        sq[start:stop] = dist * dist
    return labels, sq


def _evaluate(codebook: np.ndarray, d: int, samples: int, seed: int, workers: int) -> EstimateCI:
    def block(index: int, rows: int) -> Tuple[float, float]:
        z = normals(seed, index, (rows, d), stream=STREAM_EVAL)
        _, dist = pairwise_distances_argmin_min(z, codebook)
        sq = dist * dist
        return math.fsum(sq.tolist()), math.fsum((sq * sq).tolist())

    parts = map_blocks(block, samples, EVAL_BLOCK, workers)
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return EstimateCI(value=mean, stderr=math.sqrt(var / samples), samples=samples, seed=seed)


def train_vq(
    d: int,
    k: int,
    samples: int = 200_000,
    seed: int = 0,
    restarts: int = 8,
    eval_samples: int = 1_000_000,
    workers: int = 1,
) -> VectorQuantizer:
    """k-means++ seeded Lloyd with restarts, refined on fresh draws, evaluated independently."""

    _check(d, k)
    if samples < k:
        raise InvalidParameterError(f"need at least k={k} training samples, got {samples}")

    train = normals(seed, 0, (samples, d), stream=STREAM_TRAIN)
    km = KMeans(n_clusters=k, init="k-means++", n_init=restarts, random_state=seed, tol=1e-8)
    codebook = km.fit(train).cluster_centers_

    reseeded = 0
    for refine in range(REFINE_PASSES + MAX_RESEED_ROUNDS):
        fresh = normals(seed, refine, (samples, d), stream=STREAM_REFINE)
        codebook, dead = _reseed_dead(codebook, fresh)
        reseeded += dead
        if dead:
            log.warning("vq_reseeded", dim=d, levels=k, dead=dead, round=refine)
            if reseeded > MAX_RESEED_ROUNDS * k:
                raise ConvergenceError(
                    f"train_vq(d={d}, k={k}) keeps collapsing cells", float(dead), refine + 1
                )
        elif refine >= REFINE_PASSES:
            break
        km = KMeans(n_clusters=k, init=codebook, n_init=1, tol=1e-8)
        codebook = km.fit(fresh).cluster_centers_

    if np.unique(codebook, axis=0).shape[0] != k:
        raise ConvergenceError(f"train_vq(d={d}, k={k}) produced coincident codepoints", 0.0, 0)

    estimate = _evaluate(codebook, d, eval_samples, seed, workers)
    log.debug("vq_trained", dim=d, levels=k, distortion=estimate.value, stderr=estimate.stderr)
    return VectorQuantizer(
        dim=d,
        levels=k,
        codepoints=np.ascontiguousarray(codebook),
        distortion_estimate=estimate,
        training_seed=seed,
        reseeded_cells=reseeded,
    )


def estimate_cd(
    d: int,
    k_max: int,
    samples: int = 200_000,
    seed: int = 0,
    restarts: int = 8,
    eval_samples: int = 200_000,
    workers: int = 1,
) -> List[ScanRow]:
    """Rows (k, k^(2/d) e_k^2, running sup) from trained codebooks; failed rows marked invalid."""

    _check(d, k_max)
    rows: List[ScanRow] = []
    sup = 0.0
    for k in range(1, k_max + 1):
        scale = k ** (2.0 / d)
        try:
            vq = train_vq(d, k, samples, seed + k, restarts, eval_samples, workers)
        except ConvergenceError as exc:
            log.warning("scan_row_invalid", dim=d, levels=k, error=str(exc))
            rows.append(ScanRow(k=k, value=math.nan, running_sup=sup, valid=False, error=str(exc)))
            continue
        value = scale * vq.distortion_estimate.value
        sup = max(sup, value)
        rows.append(
            ScanRow(k=k, value=value, running_sup=sup, stderr=scale * vq.distortion_estimate.stderr)
        )
    return rows


def zador_tail(rows: List[ScanRow], tail: int = 5) -> Tuple[float, float]:
    """Mean of the last ``tail`` valid rows, an estimate of the quantization coefficient."""

    valid = [r for r in rows if r.valid][-tail:]
    if not valid:
        raise InvalidParameterError("no valid rows to estimate the quantization coefficient")
    value = math.fsum(r.value for r in valid) / len(valid)
    stderr = math.sqrt(math.fsum(r.stderr**2 for r in valid)) / len(valid)
    return value, stderr


class VectorQuantizerCache:
    """Trained codebooks keyed by (d, k) for one training configuration."""

    def __init__(
        self,
        samples: int = 200_000,
        eval_samples: int = 1_000_000,
        restarts: int = 8,
        seed: int = 0,
        workers: int = 1,
    ):
        self.samples = samples
        self.eval_samples = eval_samples
        self.restarts = restarts
        self.seed = seed
        self.workers = workers
        self._memo: Dict[Tuple[int, int], VectorQuantizer] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, config, seed: Optional[int] = None) -> "VectorQuantizerCache":
        return cls(
            samples=config.vq_train_samples,
            eval_samples=config.vq_eval_samples,
            restarts=config.vq_restarts,
            seed=config.seed if seed is None else seed,
            workers=config.workers,
        )

    def get(self, d: int, k: int) -> VectorQuantizer:
        with self._lock:
            hit = self._memo.get((d, k))
        if hit is not None:
            return hit
        if k == 1:
            vq = VectorQuantizer(
                dim=d,
                levels=1,
                codepoints=np.zeros((1, d)),
                distortion_estimate=EstimateCI(float(d), 0.0, 1, self.seed),
                training_seed=self.seed,
            )
        else:
            samples = max(self.samples, 50 * k)
            vq = train_vq(d, k, samples, self.seed, self.restarts, self.eval_samples, self.workers)
        with self._lock:
            self._memo[(d, k)] = vq
        return vq
