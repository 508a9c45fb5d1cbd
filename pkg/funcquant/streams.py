"""Reproducible standard-normal streams.

Every block of draws comes from its own Philox stream keyed by ``(seed, stream, block)``,
so a block's values never depend on which worker produced it or in what order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np
from scipy.special import ndtri

T = TypeVar("T")

_MANTISSA = 2**53


def block_generator(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), int(stream), int(block)])
    return np.random.Generator(np.random.Philox(ss))


def normals(seed: int, block: int, shape: tuple[int, ...], stream: int = 0) -> np.ndarray:
    """Standard normals by inverse-CDF of 53-bit uniforms on the open unit interval."""

    gen = block_generator(seed, block, stream)
    ints = gen.integers(0, _MANTISSA, size=shape, dtype=np.int64)
    return ndtri((ints.astype(np.float64) + 0.5) / _MANTISSA)


def block_sizes(count: int, block_size: int) -> List[int]:
    full, rest = divmod(count, block_size)
    return [block_size] * full + ([rest] if rest else [])


def map_blocks(
    fn: Callable[[int, int], T], count: int, block_size: int, workers: int = 1
) -> List[T]:
    """Apply ``fn(block_index, rows)`` to every block; results come back in block order."""

    sizes = block_sizes(count, block_size)
    if workers <= 1 or len(sizes) <= 1:
        return [fn(i, rows) for i, rows in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))
