"""Named Gaussian processes: spectra, kernels and their published sharp laws."""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Tuple

from scipy.special import gamma

from ..errors import InvalidParameterError, UnknownProcessError
from ..spectra import (
    CovarianceKernel,
    ExactBM,
    ExactBridge,
    ExplicitList,
    RegularVarying,
    SpectrumModel,
    bm_kernel,
    bridge_kernel,
    diffusion_kernel,
    diffusion_model,
    fbm_kernel,
    fbm_model,
    fou_kernel,
    fou_model,
    ibm_kernel,
    ibm_model,
    ou_model,
    sheet_kernel,
    stationary_spectral,
    tensor_asymptotic,
)
from .base import AsymptoticForm, LawForm, Process

PI = math.pi
BM_LAW = LawForm(math.sqrt(2.0) / PI, -0.5)


def _form(model: RegularVarying) -> AsymptoticForm:
    return AsymptoticForm(model.c, model.b, model.a)


@dataclass
class BrownianMotion(Process):
    def model(self) -> SpectrumModel:
        return ExactBM()

    def asymptotic_form(self) -> AsymptoticForm:
        return AsymptoticForm(PI**-2, 2.0)

    def kernel(self) -> CovarianceKernel:
        return bm_kernel()

    def transcribed_law(self) -> LawForm:
        return BM_LAW


@dataclass
class GaussianDiffusion(Process):
    """Diffusions driven by BM noise inherit the Brownian constants."""

    def model(self) -> SpectrumModel:
        return diffusion_model()

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(diffusion_model())

    def kernel(self) -> CovarianceKernel:
        return diffusion_kernel(self.params["theta"], self.params["sigma2"])

    def transcribed_law(self) -> LawForm:
        return BM_LAW


@dataclass
class Stationary(Process):
    def model(self) -> SpectrumModel:
        return stationary_spectral(self.params["c"], self.params["b"])

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(stationary_spectral(self.params["c"], self.params["b"]))

    def transcribed_law(self) -> LawForm:
        c, b = self.params["c"], self.params["b"]
        k = math.sqrt(2.0 * c * (b / (2.0 * PI)) ** (b - 1.0) * b / (b - 1.0))
        return LawForm(k, -(b - 1.0) / 2.0)


@dataclass
class FractionalOU(Process):
    def model(self) -> SpectrumModel:
        return fou_model(self.params["a"], self.params["rho"])

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(fou_model(self.params["a"], self.params["rho"]))

    def kernel(self) -> CovarianceKernel:
        return fou_kernel(self.params["a"], self.params["rho"])

    def transcribed_law(self) -> LawForm:
        a, rho = self.params["a"], self.params["rho"]
        k = math.sqrt(2.0 * a * gamma(rho) * math.sin(PI * rho / 2.0) * (1.0 + rho) / PI)
        k *= ((1.0 + rho) / (2.0 * PI)) ** (rho / 2.0)
        return LawForm(k, -rho / 2.0)


@dataclass
class OrnsteinUhlenbeck(Process):
    def model(self) -> SpectrumModel:
        return ou_model(self.params["a"])

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(ou_model(self.params["a"]))

    def kernel(self) -> CovarianceKernel:
        return fou_kernel(self.params["a"], 1.0)

    def transcribed_law(self) -> LawForm:
        return LawForm(2.0 * math.sqrt(self.params["a"]) / PI, -0.5)


@dataclass
class IntegratedBM(Process):
    def model(self) -> SpectrumModel:
        return ibm_model(self.params["m"])

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(ibm_model(self.params["m"]))

    def kernel(self) -> CovarianceKernel:
        return ibm_kernel(self.params["m"])

    def transcribed_law(self) -> LawForm:
        m = self.params["m"]
        k = PI ** (-(m + 1.0)) * (m + 1.0) ** (m + 0.5) * math.sqrt((2.0 * m + 2.0) / (2.0 * m + 1.0))
        return LawForm(k, -(m + 0.5))


@dataclass
class FractionalBM(Process):
    def model(self) -> SpectrumModel:
        return fbm_model(self.params["beta"])

    def asymptotic_form(self) -> AsymptoticForm:
        return _form(fbm_model(self.params["beta"]))

    def kernel(self) -> CovarianceKernel:
        return fbm_kernel(self.params["beta"])

    def transcribed_law(self) -> LawForm:
        beta = self.params["beta"]
        k = math.sqrt(gamma(2.0 * beta) * math.sin(PI * beta) * (1.0 + 2.0 * beta) / PI)
        k *= ((1.0 + 2.0 * beta) / (2.0 * PI)) ** beta
        return LawForm(k, -beta)


@dataclass
class Sheet(Process):
    """Tensor-product field on [0,1]^d built from one-dimensional factors."""

    @abc.abstractmethod
    def factors(self) -> List[Process]:
        """One-dimensional factor processes, one per axis."""

    @property
    def d(self) -> int:
        return self.params["d"]

    def model(self) -> SpectrumModel:
        if self.d == 1:
            return self.factors()[0].model()
        form = self.asymptotic_form()
        return RegularVarying(form.c, form.b, form.a, label="TensorSheet")

    def asymptotic_form(self) -> AsymptoticForm:
        forms = [f.asymptotic_form() for f in self.factors()]
        sheet = tensor_asymptotic([f.c for f in forms], [f.b for f in forms], self.d)
        return _form(sheet)

    def kernel(self) -> CovarianceKernel:
        return sheet_kernel([f.kernel() for f in self.factors()], name=self.name)


def _per_factor(values: Any, d: int, label: str) -> List[float]:
    values = values if isinstance(values, list) else [values]
    if len(values) == 1:
        values = values * d
    if len(values) != d:
        raise InvalidParameterError(f"{label} needs 1 or d={d} values, got {len(values)}")
    return [float(v) for v in values]


@dataclass
class FractionalOUSheet(Sheet):
    def factors(self) -> List[Process]:
        rho = self.params["rho"]
        return [
            FractionalOU("fou", {"a": a, "rho": rho})
            for a in _per_factor(self.params["a"], self.d, "a")
        ]

    def transcribed_law(self) -> LawForm:
        rho, d = self.params["rho"], self.d
        a_prod = math.prod(_per_factor(self.params["a"], d, "a"))
        k = math.sqrt(a_prod)
        k *= (2.0 * gamma(1.0 + rho) * math.sin(PI * rho / 2.0) / PI ** (1.0 + rho)) ** (d / 2.0)
        k *= math.factorial(d - 1) ** (-(1.0 + rho) / 2.0)
        k *= math.sqrt(((1.0 + rho) / 2.0) ** rho * (1.0 + rho) / rho)
        return LawForm(k, -rho / 2.0, (1.0 + rho) * (d - 1) / 2.0)


@dataclass
class OUSheet(Sheet):
    def factors(self) -> List[Process]:
        return [OrnsteinUhlenbeck("ou", {"a": a}) for a in _per_factor(self.params["a"], self.d, "a")]

    def transcribed_law(self) -> LawForm:
        d = self.d
        a_prod = math.prod(_per_factor(self.params["a"], d, "a"))
        k = math.sqrt(a_prod) * 2.0 ** ((d + 1) / 2.0) / (PI**d * math.factorial(d - 1))
        return LawForm(k, -0.5, float(d - 1))


@dataclass
class FractionalBrownianSheet(Sheet):
    def factors(self) -> List[Process]:
        return [FractionalBM("fbm", {"beta": self.params["beta"]}) for _ in range(self.d)]

    def transcribed_law(self) -> LawForm:
        beta, d = self.params["beta"], self.d
        h = 1.0 + 2.0 * beta
        k = (gamma(h) * math.sin(PI * beta) / PI**h) ** (d / 2.0)
        k *= math.factorial(d - 1) ** (-h / 2.0)
        k *= math.sqrt((h / 2.0) ** (2.0 * beta) * h / (2.0 * beta))
        return LawForm(k, -beta, h * (d - 1) / 2.0)


@dataclass
class BrownianSheet(Sheet):
    def factors(self) -> List[Process]:
        return [BrownianMotion("bm") for _ in range(self.d)]

    def transcribed_law(self) -> LawForm:
        d = self.d
        return LawForm(math.sqrt(2.0) / (PI**d * math.factorial(d - 1)), -0.5, float(d - 1))


@dataclass
class _BridgeFactor(Process):
    def model(self) -> SpectrumModel:
        return ExactBridge()

    def asymptotic_form(self) -> AsymptoticForm:
        return AsymptoticForm(PI**-2, 2.0)

    def kernel(self) -> CovarianceKernel:
        return bridge_kernel()


@dataclass
class TuggedBrownianSheet(BrownianSheet):
    def factors(self) -> List[Process]:
        return [_BridgeFactor("bridge") for _ in range(self.d)]


@dataclass
class RegularVaryingProcess(Process):
    def model(self) -> SpectrumModel:
        return RegularVarying(self.params["c"], self.params["b"], self.params.get("a", 0.0))

    def asymptotic_form(self) -> AsymptoticForm:
        return AsymptoticForm(self.params["c"], self.params["b"], self.params.get("a", 0.0))


@dataclass
class Explicit(Process):
    def model(self) -> SpectrumModel:
        return ExplicitList(tuple(self.params["values"]))


# name -> (class, defaults, integer-valued params)
CATALOG: Dict[str, Tuple[Callable[..., Process], Dict[str, Any], Tuple[str, ...]]] = {
    "bm": (BrownianMotion, {}, ()),
    "diffusion": (GaussianDiffusion, {"theta": 1.0, "sigma2": 0.0}, ()),
    "stationary": (Stationary, {"c": 1.0, "b": 2.0}, ()),
    "ou": (OrnsteinUhlenbeck, {"a": 1.0}, ()),
    "fou": (FractionalOU, {"a": 1.0, "rho": 1.0}, ()),
    "ibm": (IntegratedBM, {"m": 1}, ("m",)),
    "fbm": (FractionalBM, {"beta": 0.5}, ()),
    "ous": (OUSheet, {"a": 1.0, "d": 2}, ("d",)),
    "fous": (FractionalOUSheet, {"a": 1.0, "rho": 1.0, "d": 2}, ("d",)),
    "fbs": (FractionalBrownianSheet, {"beta": 0.5, "d": 2}, ("d",)),
    "bs": (BrownianSheet, {"d": 2}, ("d",)),
    "tugged_bs": (TuggedBrownianSheet, {"d": 2}, ("d",)),
    "regvar": (RegularVaryingProcess, {"c": 1.0, "b": 2.0, "a": 0.0}, ()),
    "explicit": (Explicit, {}, ()),
}


def _coerce(key: str, raw: str, integers: Tuple[str, ...]) -> Any:
    try:
        if key in integers:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"parameter {key}={raw!r} is not numeric") from exc


def parse_process_spec(text: str) -> Tuple[str, Dict[str, Any]]:
    """``name[:k=v,...]``; repeated keys collect into lists; ``explicit:4,1`` lists values."""

    name, _, rest = text.strip().partition(":")
    name = name.strip().lower().replace("-", "_")
    if name not in CATALOG:
        raise UnknownProcessError(
            f"unknown process {name!r}; known: {', '.join(sorted(CATALOG))}"
        )
    _, defaults, integers = CATALOG[name]
    tokens = [tok.strip() for tok in rest.split(",") if tok.strip()]
    if name == "explicit":
        if not tokens:
            raise InvalidParameterError("explicit process needs eigenvalues, e.g. explicit:4,1")
        return name, {"values": [_coerce("value", tok, ()) for tok in tokens]}

    given: Dict[str, Any] = {}
    for tok in tokens:
        key, sep, raw = tok.partition("=")
        key = key.strip()
        if not sep or key not in defaults:
            raise InvalidParameterError(
                f"bad parameter {tok!r} for {name}; expected one of {sorted(defaults)}"
            )
        value = _coerce(key, raw.strip(), integers)
        if key in given:
            prev = given[key]
            given[key] = (prev if isinstance(prev, list) else [prev]) + [value]
        else:
            given[key] = value
    return name, {**defaults, **given}


def resolve_process(text: str) -> Process:
    name, params = parse_process_spec(text)
    cls = CATALOG[name][0]
    if "d" in params and params["d"] < 1:
        raise InvalidParameterError(f"sheet dimension must be >= 1, got {params['d']}")
    process = cls(name, params)
    process.model()  # validate parameters eagerly
    return process


def build_default_catalog(d: int = 2) -> List[Process]:
    """One instance of every process with a published sharp law."""

    return [
        resolve_process(spec)
        for spec in (
            "bm",
            "diffusion",
            "stationary:c=0.5,b=2.5",
            "ou:a=2",
            "fou:a=1.5,rho=0.6",
            "ibm:m=1",
            "ibm:m=2",
            "fbm:beta=0.7",
            "fbm:beta=0.5",
            f"ous:a=1,a=2,d={d}" if d == 2 else f"ous:a=1,d={d}",
            f"fous:a=1,rho=0.5,d={d}",
            f"fbs:beta=0.3,d={d}",
            f"bs:d={d}",
            f"tugged_bs:d={d}",
        )
    ]


def known_processes() -> List[str]:
    return sorted(CATALOG)
