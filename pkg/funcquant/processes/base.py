"""Process catalog base classes."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..errors import InvalidParameterError
from ..spectra import CovarianceKernel, SpectrumModel


@dataclass(frozen=True)
class LawForm:
    """e_n ~ constant * (log n)^log_power * (log log n)^loglog_power."""

    constant: float
    log_power: float
    loglog_power: float = 0.0


@dataclass(frozen=True)
class AsymptoticForm:
    """lambda_j ~ c j^-b (log j)^-a."""

    c: float
    b: float
    a: float = 0.0


@dataclass
class Process(abc.ABC):
    name: str
    params: Dict[str, Any] = field(default_factory=dict)

    @abc.abstractmethod
    def model(self) -> SpectrumModel:
        ...

    def asymptotic_form(self) -> AsymptoticForm:
        raise InvalidParameterError(f"process {self.name!r} has no regular-variation form")

    def kernel(self) -> CovarianceKernel:
        raise InvalidParameterError(f"process {self.name!r} has no closed-form covariance kernel")

    def transcribed_law(self) -> Optional[LawForm]:
        """The published sharp law for this process, if one exists."""

        return None

    def describe(self) -> Dict[str, Any]:
        return {"process": self.name, **self.params}
