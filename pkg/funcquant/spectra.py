"""Karhunen-Loeve spectra: exact and asymptotic eigenvalue models, kernels and Nystrom."""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.integrate import quad
from scipy.linalg import eigh
from scipy.special import gamma, polygamma

from .errors import InvalidParameterError, KernelError
from .models import EigenSequence, TailSum

log = structlog.get_logger(__name__)

TAIL_J_MAX = 10_000_000
TAIL_REL_TOL = 1e-12
_FIRST_ANCHOR = 1024
_CHUNK = 1 << 20


class SpectrumModel(abc.ABC):
    """Positive nonincreasing eigenvalue sequence of a Gaussian covariance operator."""

    method: str = "asymptotic"
    support: Optional[int] = None

    @abc.abstractmethod
    def values_at(self, j: np.ndarray) -> np.ndarray:
        """Eigenvalues at 1-based indices ``j``."""

    @abc.abstractmethod
    def tail(self, m: int) -> TailSum:
        """Sum of eigenvalues with index > m."""

    @abc.abstractmethod
    def describe(self) -> dict:
        ...

    def eigenvalue(self, j: int) -> float:
        return float(self.values_at(np.array([j], dtype=np.float64))[0])

    def eigenvalues(self, count: int) -> np.ndarray:
        if count < 1:
            raise InvalidParameterError(f"count must be >= 1, got {count}")
        if self.support is not None:
            count = min(count, self.support)
        return self.values_at(np.arange(1, count + 1, dtype=np.float64))

    @property
    def trace(self) -> float:
        return self.tail(0).value

    def partial_sum(self, m: int) -> float:
        if m <= 0:
            return 0.0
        return math.fsum(self.eigenvalues(m).tolist())


@dataclass(frozen=True)
class ExactBM(SpectrumModel):
    """Brownian motion on [0,1]: (pi (k - 1/2))^-2."""

    method: str = field(default="exact", init=False)

    def values_at(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=np.float64)
        return 1.0 / np.square(math.pi * (j - 0.5))

    def tail(self, m: int) -> TailSum:
        _check_index(m)
        return TailSum(float(polygamma(1, m + 0.5)) / math.pi**2)

    def describe(self) -> dict:
        return {"kind": "ExactBM"}


@dataclass(frozen=True)
class ExactBridge(SpectrumModel):
    """Brownian bridge on [0,1]: (pi k)^-2."""

    method: str = field(default="exact", init=False)

    def values_at(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=np.float64)
        return 1.0 / np.square(math.pi * j)

    def tail(self, m: int) -> TailSum:
        _check_index(m)
        return TailSum(float(polygamma(1, m + 1.0)) / math.pi**2)

    def describe(self) -> dict:
        return {"kind": "ExactBridge"}


@dataclass(frozen=True)
class ExplicitList(SpectrumModel):
    """User-supplied finite spectrum."""

    values: Tuple[float, ...]
    method: str = field(default="exact", init=False)

    def __post_init__(self) -> None:
        vals = tuple(sorted((float(v) for v in self.values), reverse=True))
        if not vals or vals[-1] <= 0 or not all(math.isfinite(v) for v in vals):
            raise InvalidParameterError("explicit eigenvalues must be finite and positive")
        object.__setattr__(self, "values", vals)

    @property
    def support(self) -> int:  # type: ignore[override]
        return len(self.values)

    def values_at(self, j: np.ndarray) -> np.ndarray:
        idx = np.asarray(j, dtype=np.int64) - 1
        arr = np.asarray(self.values)
        out = np.zeros(idx.shape)
        inside = idx < arr.size
        out[inside] = arr[idx[inside]]
        return out

    def tail(self, m: int) -> TailSum:
        _check_index(m)
        return TailSum(math.fsum(self.values[m:]))

    def describe(self) -> dict:
        return {"kind": "ExplicitList", "values": list(self.values)}


@dataclass(frozen=True)
class RegularVarying(SpectrumModel):
    """lambda_j = c j^-b (log(j+1))^-a beyond a flat head that keeps the sequence monotone."""

    c: float
    b: float
    a: float = 0.0
    label: str = "RegularVarying"

    def __post_init__(self) -> None:
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidParameterError(f"c must be positive, got {self.c}")
        if self.b < 1 or (self.b == 1 and self.a <= 1):
            raise InvalidParameterError(
                f"trace diverges for b={self.b}, a={self.a}: need b > 1 or (b = 1, a > 1)"
            )

    @property
    def head(self) -> int:
        return _monotone_start(self.b, self.a)

    def function(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        out = self.c * np.power(x, -self.b)
        if self.a != 0.0:
            out = out * np.power(np.log1p(x), -self.a)
        return out

    def values_at(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=np.float64)
        return self.function(np.maximum(j, float(self.head)))

    def tail(self, m: int) -> TailSum:
        _check_index(m)
        anchors, far, bound = _anchored_tails(self)
        if m >= anchors[-1]:
            return _integral_tail(self, m)
        i = int(np.searchsorted(anchors, m, side="left"))
        head = _chunked_sum(self, m, int(anchors[i]))
        return TailSum(math.fsum([head, far[i]]), bound)

    def describe(self) -> dict:
        return {"kind": self.label, "c": self.c, "b": self.b, "a": self.a}


def _check_index(m: int) -> None:
    if m < 0:
        raise InvalidParameterError(f"tail index must be >= 0, got {m}")


def _monotone_start(b: float, a: float) -> int:
    """Smallest j from which c x^-b (log(x+1))^-a is decreasing."""

    p = -a  # positive log power
    if p <= 0:
        return 1
    j = 1
    while True:
        g = b * (j + 1) * math.log(j + 1) - p * j
        dg = b * (math.log(j + 1) + 1) - p
        if g > 0 and dg > 0:
            return j
        j += 1


def _chunked_sum(model: RegularVarying, start: int, stop: int) -> float:
    """Sum of lambda_j for start < j <= stop."""

    parts = []
    lo = start + 1
    while lo <= stop:
        hi = min(stop, lo + _CHUNK - 1)
        parts.append(float(model.values_at(np.arange(lo, hi + 1, dtype=np.float64)).sum()))
        lo = hi + 1
    return math.fsum(parts)


def _integral_beyond(model: RegularVarying, x0: float) -> float:
    """Integral of the asymptotic function over [x0, inf)."""

    c, b, a = model.c, model.b, model.a
    if a == 0.0:
        return c * x0 ** (1.0 - b) / (b - 1.0)

    def log1pexp(u: float) -> float:
        return u + math.log1p(math.exp(-u))

    if b > 1.0:

        def integrand(u: float) -> float:
            return c * math.exp((1.0 - b) * u) * log1pexp(u) ** (-a)

        value, _ = quad(integrand, math.log(x0), math.inf, limit=200)
        return value

    def integrand_w(w: float) -> float:
        u = math.exp(w)
        return c * u * log1pexp(u) ** (-a)

    value, _ = quad(integrand_w, math.log(math.log(x0)), math.inf, limit=200)
    return value


def _sandwich_width(model: RegularVarying, j: int) -> float:
    value, _ = quad(lambda x: float(model.function(x)), j, j + 1)
    return value


def _integral_tail(model: RegularVarying, m: int) -> TailSum:
    return TailSum(_integral_beyond(model, m + 0.5), _sandwich_width(model, m))


@lru_cache(maxsize=256)
def _anchored_tails(model: RegularVarying) -> Tuple[np.ndarray, List[float], float]:
    """Tails beyond anchors 1024 * 2^i, closed off by an integral once the sandwich is tight."""

    scale = _chunked_sum(model, 0, _FIRST_ANCHOR)
    anchors = [_FIRST_ANCHOR]
    while True:
        top = anchors[-1]
        if top >= TAIL_J_MAX or _sandwich_width(model, top) < TAIL_REL_TOL * scale:
            break
        anchors.append(min(2 * top, TAIL_J_MAX))

    top = anchors[-1]
    bound = _sandwich_width(model, top)
    far = [0.0] * len(anchors)
    far[-1] = _integral_beyond(model, top + 0.5)
    for i in range(len(anchors) - 2, -1, -1):
        far[i] = math.fsum([_chunked_sum(model, anchors[i], anchors[i + 1]), far[i + 1]])
    if top >= TAIL_J_MAX:
        log.debug("tail_sum_truncated", model=model.describe(), j=top, bound=bound)
    return np.asarray(anchors, dtype=np.int64), far, bound


# -- catalog constructors ------------------------------------------------------------------


def stationary_spectral(c: float, b: float, label: str = "StationarySpectral") -> RegularVarying:
    """Stationary process whose spectral density decays like c |x|^-b."""

    if not (c > 0 and b > 1):
        raise InvalidParameterError(f"stationary spectrum needs c > 0 and b > 1, got c={c}, b={b}")
    return RegularVarying(2.0 * c * math.pi ** (-(b - 1.0)), b, 0.0, label=label)


def fou_spectral_constant(a: float, rho: float) -> float:
    _check_fou(a, rho)
    return a * float(gamma(1.0 + rho)) * math.sin(math.pi * rho / 2.0) / math.pi


def _check_fou(a: float, rho: float) -> None:
    if not 0.0 < rho < 2.0:
        raise InvalidParameterError(f"rho must lie in (0, 2), got {rho}")
    if a <= 0:
        raise InvalidParameterError(f"a must be positive, got {a}")


def fou_model(a: float, rho: float) -> RegularVarying:
    return stationary_spectral(fou_spectral_constant(a, rho), 1.0 + rho, label="FOU")


def ou_model(a: float) -> RegularVarying:
    return stationary_spectral(fou_spectral_constant(a, 1.0), 2.0, label="OU")


def fbm_constant(beta: float) -> float:
    if not 0.0 < beta < 1.0:
        raise InvalidParameterError(f"beta must lie in (0, 1), got {beta}")
    return float(gamma(1.0 + 2.0 * beta)) * math.sin(math.pi * beta) / (2.0 * math.pi)


def fbm_model(beta: float) -> RegularVarying:
    c = fbm_constant(beta)
    return RegularVarying(2.0 * c * math.pi ** (-2.0 * beta), 1.0 + 2.0 * beta, 0.0, label="FBM")


def ibm_model(m: int) -> RegularVarying:
    if int(m) != m or m < 0:
        raise InvalidParameterError(f"integration order must be a nonnegative integer, got {m}")
    power = 2.0 * m + 2.0
    return RegularVarying(math.pi ** (-power), power, 0.0, label="IBM")


def diffusion_model() -> RegularVarying:
    """Gaussian diffusions with BM-type noise share the BM eigenvalue asymptotics."""

    return RegularVarying(math.pi**-2, 2.0, 0.0, label="GaussianDiffusion")


def tensor_asymptotic(c_list: Sequence[float], b: float | Sequence[float], d_sheet: int) -> RegularVarying:
    """lambda_k ~ K k^-b (log k)^(b (d-1)) with K = prod(c_j) ((d-1)!)^-b."""

    if d_sheet < 1 or len(c_list) != d_sheet:
        raise InvalidParameterError(f"need one constant per factor for d={d_sheet}, got {len(c_list)}")
    indices = [b] * d_sheet if isinstance(b, (int, float)) else list(b)
    if len(indices) != d_sheet or any(abs(x - indices[0]) > 1e-12 for x in indices):
        raise InvalidParameterError(f"all tensor factors must share one index b, got {indices}")
    index = float(indices[0])
    if index <= 1:
        raise InvalidParameterError(f"tensor factors need b > 1, got {index}")
    constant = math.prod(c_list) * math.factorial(d_sheet - 1) ** (-index)
    return RegularVarying(constant, index, -index * (d_sheet - 1), label="TensorSheet")


def tensor_product_eigs(factor_values: Sequence[np.ndarray], count: int) -> np.ndarray:
    """Largest ``count`` products lambda_{i1} ... lambda_{id} of the given factor spectra."""

    if count < 1 or not factor_values:
        raise InvalidParameterError("tensor_product_eigs needs count >= 1 and at least one factor")
    current = np.sort(np.asarray(factor_values[0], dtype=np.float64))[::-1][:count]
    for values in factor_values[1:]:
        values = np.sort(np.asarray(values, dtype=np.float64))[::-1][:count]
        products = np.multiply.outer(current, values).ravel()
        keep = min(count, products.size)
        top = np.partition(products, products.size - keep)[products.size - keep :]
        current = np.sort(top)[::-1]
    return current


def eigenvalues(model: SpectrumModel, count: int) -> EigenSequence:
    return EigenSequence(values=model.eigenvalues(count), method=model.method)


def tail_sum(model: SpectrumModel, m: int) -> TailSum:
    return model.tail(m)


# -- kernels --------------------------------------------------------------------------------

KernelFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CovarianceKernel:
    """C(s, t) on [0,1]^dim, evaluated on broadcast arrays of shape (..., dim)."""

    name: str
    factors: Tuple[KernelFn, ...]
    params: Dict[str, float] = field(default_factory=dict, hash=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __call__(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        if self.dim == 1 and (s.ndim == 0 or s.shape[-1] != 1):
            return self.factors[0](s, t)
        out = np.ones(np.broadcast_shapes(s.shape[:-1], t.shape[:-1]))
        for i, factor in enumerate(self.factors):
            out = out * factor(s[..., i], t[..., i])
        return out

    def diagonal_integral(self, points: int = 4096) -> float:
        """Midpoint estimate of the trace, the integral of C(t, t)."""

        grid = (np.arange(points) + 0.5) / points
        return math.prod(float(np.mean(f(grid, grid))) for f in self.factors)


def _bm(s, t):
    return np.minimum(s, t)


def _bridge(s, t):
    return np.minimum(s, t) - s * t


def _constant(s, t):
    return np.ones(np.broadcast_shapes(np.shape(s), np.shape(t)))


def bm_kernel() -> CovarianceKernel:
    return CovarianceKernel("bm", (_bm,))


def bridge_kernel() -> CovarianceKernel:
    return CovarianceKernel("bridge", (_bridge,))


def constant_kernel() -> CovarianceKernel:
    return CovarianceKernel("constant", (_constant,))


def diffusion_kernel(theta: float = 1.0, sigma2: float = 0.0) -> CovarianceKernel:
    """dX = -theta X dt + dB on [0,1] with X_0 ~ N(0, sigma2)."""

    if theta <= 0 or sigma2 < 0:
        raise InvalidParameterError(f"need theta > 0 and sigma2 >= 0, got {theta}, {sigma2}")

    def fn(s, t):
        both = np.exp(-theta * (s + t))
        return sigma2 * both + (np.exp(-theta * np.abs(t - s)) - both) / (2.0 * theta)

    return CovarianceKernel("diffusion", (fn,), {"theta": theta, "sigma2": sigma2})


def _fou_factor(a: float, rho: float) -> KernelFn:
    _check_fou(a, rho)

    def fn(s, t):
        return np.exp(-a * np.abs(s - t) ** rho)

    return fn


def fou_kernel(a: float = 1.0, rho: float = 1.0) -> CovarianceKernel:
    return CovarianceKernel("fou", (_fou_factor(a, rho),), {"a": a, "rho": rho})


def _fbm_factor(beta: float) -> KernelFn:
    fbm_constant(beta)
    h2 = 2.0 * beta

    def fn(s, t):
        return 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(s - t) ** h2)

    return fn


def fbm_kernel(beta: float) -> CovarianceKernel:
    return CovarianceKernel("fbm", (_fbm_factor(beta),), {"beta": beta})


def _ibm_factor(m: int) -> KernelFn:
    if int(m) != m or m < 0:
        raise InvalidParameterError(f"integration order must be a nonnegative integer, got {m}")
    m = int(m)
    nodes, weights = np.polynomial.legendre.leggauss(m + 1)
    norm = float(math.factorial(m)) ** 2

    def fn(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=np.float64), np.asarray(t, dtype=np.float64))
        upper = np.minimum(s, t)
        u = 0.5 * upper[..., None] * (1.0 + nodes)
        integrand = (s[..., None] - u) ** m * (t[..., None] - u) ** m
        return 0.5 * upper * np.sum(weights * integrand, axis=-1) / norm

    return fn


def ibm_kernel(m: int) -> CovarianceKernel:
    """m-fold integrated Brownian motion; the polynomial integral is exact at m+1 nodes."""

    return CovarianceKernel("ibm", (_ibm_factor(m),), {"m": m})


def sheet_kernel(factors: Sequence[CovarianceKernel], name: str = "sheet") -> CovarianceKernel:
    fns: List[KernelFn] = []
    for kernel in factors:
        fns.extend(kernel.factors)
    return CovarianceKernel(name, tuple(fns))


def nystrom_eigs(kernel: CovarianceKernel, grid: int, count: Optional[int] = None) -> EigenSequence:
    """Eigenvalues of the midpoint-rule discretization C(s_i, s_j) / N^dim, descending."""

    if grid < 2:
        raise InvalidParameterError(f"Nystrom grid must be >= 2, got {grid}")
    axis = (np.arange(grid, dtype=np.float64) + 0.5) / grid
    if kernel.dim == 1:
        points = axis[:, None]
    else:
        mesh = np.meshgrid(*([axis] * kernel.dim), indexing="ij")
        points = np.stack([g.ravel() for g in mesh], axis=-1)
    size = points.shape[0]
    matrix = kernel(points[:, None, :], points[None, :, :]) / size

    asym = float(np.max(np.abs(matrix - matrix.T)))
    if asym > 1e-12 * max(float(np.max(np.abs(matrix))), 1e-300):
        raise KernelError(f"kernel {kernel.name!r} is not symmetric (max asymmetry {asym:.3e})")

    values = eigh(matrix, eigvals_only=True)[::-1]
    trace = float(np.trace(matrix))
    if values[-1] < -1e-10 * trace:
        raise KernelError(
            f"kernel {kernel.name!r} is not positive semi-definite (eigenvalue {values[-1]:.3e})"
        )
    log.debug("nystrom_solved", kernel=kernel.name, grid=grid, trace=trace)
    if count is not None:
        values = values[:count]
    return EigenSequence(values=np.ascontiguousarray(values), method="nystrom")
