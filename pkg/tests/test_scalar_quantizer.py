import math

import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar
from scipy.special import ndtr

from funcquant import scalar_quantizer
from funcquant.db import CodebookStore
from funcquant.errors import InvalidParameterError
from funcquant.scalar_quantizer import (
    LIMIT_C1,
    ScalarQuantizerCache,
    c1_scan,
    density,
    from_codepoints,
    lloyd_1d,
    quantile_init,
    quantize_scalar,
)


def test_one_level_is_the_mean():
    q = lloyd_1d(1)
    assert q.codepoints.tolist() == [0.0]
    assert q.distortion == 1.0


def test_two_levels_closed_form():
    q = lloyd_1d(2)
    assert q.codepoints == pytest.approx([-math.sqrt(2 / math.pi), math.sqrt(2 / math.pi)], abs=1e-12)
    assert q.distortion == pytest.approx(1 - 2 / math.pi, abs=1e-10)


def test_three_levels_match_brute_force():
    def distortion(c: float) -> float:
        return 1.0 - 4.0 * c * float(density(c / 2)) + 2.0 * c * c * float(ndtr(-c / 2))

    best = minimize_scalar(distortion, bounds=(0.5, 3.0), method="bounded", options={"xatol": 1e-12})
    q = lloyd_1d(3)
    assert q.codepoints[1] == 0.0
    assert q.codepoints[2] == pytest.approx(best.x, abs=1e-5)
    assert q.distortion == pytest.approx(best.fun, abs=1e-7)


def _cell_error(a: float, lo: float, hi: float) -> float:
    mass = float(ndtr(hi) - ndtr(lo))
    first = float(density(lo) - density(hi))
    edge = float(lo * density(lo)) - (float(hi * density(hi)) if math.isfinite(hi) else 0.0)
    return mass + edge - 2.0 * a * first + a * a * mass


def test_four_levels_match_brute_force():
    def distortion(inner_outer: np.ndarray) -> float:
        inner, outer = (float(v) for v in inner_outer)
        cut = 0.5 * (inner + outer)
        return 2.0 * (_cell_error(inner, 0.0, cut) + _cell_error(outer, cut, math.inf))

    best = minimize(
        distortion,
        x0=np.array([0.4, 1.6]),
        method="Nelder-Mead",
        options={"xatol": 1e-11, "fatol": 1e-15, "maxiter": 10_000},
    )
    q = lloyd_1d(4)
    assert q.codepoints[2:] == pytest.approx(np.sort(best.x), abs=1e-5)
    assert q.distortion == pytest.approx(best.fun, abs=1e-7)


@pytest.mark.parametrize("k", [4, 7, 16, 51])
def test_stationary_symmetric_and_identity_agrees(k: int):
    q = lloyd_1d(k)
    assert q.stationarity_residual < 1e-10
    assert np.all(np.diff(q.codepoints) > 0)
    assert q.codepoints == pytest.approx(-q.codepoints[::-1], abs=1e-13)
    assert q.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert q.identity_distortion == pytest.approx(q.distortion, abs=1e-9)


def test_distortion_decreases_with_levels():
    values = [lloyd_1d(k).distortion for k in range(1, 30)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_k_squared_distortion_below_limit_up_to_1000():
    rows = c1_scan(1000, ScalarQuantizerCache())
    assert all(r.valid for r in rows)
    assert max(r.value for r in rows) <= LIMIT_C1 + 1e-3
    assert abs(rows[-1].value - 2.7206) < 0.03
    assert rows[-1].running_sup == pytest.approx(max(r.value for r in rows))


def test_invalid_level_counts():
    for bad in (0, -3, 2.5, True):
        with pytest.raises(InvalidParameterError):
            lloyd_1d(bad)


def test_quantile_init_is_symmetric():
    points = quantile_init(5)
    assert points[2] == 0.0
    assert points == pytest.approx(-points[::-1])


def test_quantize_scalar_maps_to_nearest():
    q = lloyd_1d(2)
    out = quantize_scalar(q, np.array([-1.0, 0.5, 0.0, 3.0]))
    a = math.sqrt(2 / math.pi)
    assert out == pytest.approx([-a, a, a, a])


def test_from_codepoints_rebuilds_quantizer():
    q = lloyd_1d(6)
    rebuilt = from_codepoints(q.codepoints.tolist())
    assert rebuilt.distortion == pytest.approx(q.distortion, abs=1e-14)
    assert rebuilt.thresholds == pytest.approx(q.thresholds)


def test_cache_reads_back_from_store(tmp_path, mocker):
    store = CodebookStore.in_dir(tmp_path)
    first = ScalarQuantizerCache(store=store).get(9)
    assert store.count() == 1

    spy = mocker.spy(scalar_quantizer, "lloyd_1d")
    second = ScalarQuantizerCache(store=store).get(9)
    assert spy.call_count == 0
    assert second.distortion == pytest.approx(first.distortion, abs=1e-14)
    store.close()


def test_cache_memoizes(mocker):
    cache = ScalarQuantizerCache(max_cached=10)
    spy = mocker.spy(scalar_quantizer, "lloyd_1d")
    cache.get(5)
    cache.get(5)
    cache.get(12)
    cache.get(12)
    assert spy.call_count == 3
    assert len(cache) == 1
