"""Sharp asymptotic constants and rates for product quantization errors."""

from __future__ import annotations

import math
from typing import Tuple, Union

import structlog

from .errors import InvalidParameterError, TranscriptionMismatchError
from .models import SharpLaw
from .processes.base import Process
from .processes.catalog import resolve_process
from .scalar_quantizer import LIMIT_C1

log = structlog.get_logger(__name__)

INDEX_B = "index_b"
INDEX_MINUS_ONE = "index_minus_one"
TRANSCRIPTION_RTOL = 1e-12

# (log n, relative slack) pairs; below the first grid point the first slack applies
SLACK_SCHEDULE: Tuple[Tuple[float, float], ...] = ((1e2, 0.5), (1e3, 0.25), (1e4, 0.10))
SLACK_NOTE = "finite-n slack is an empirical tolerance, not a proven second-order bound"


def _check_index(b: float, a: float) -> None:
    if b < 1 or (b == 1 and a <= 1):
        raise InvalidParameterError(
            f"trace diverges for b={b}, a={a}: need b > 1 or (b = 1, a > 1)"
        )


def sharp_constant(c: float, b: float, a: float = 0.0, c1: float = LIMIT_C1) -> SharpLaw:
    """Predicted e_n for eigenvalues lambda_j ~ c j^-b (log j)^-a.

    For b > 1 the error behaves like K (log n)^(-(b-1)/2) (log log n)^(-a/2); for b = 1
    the log n factor disappears and only a log log n power remains.
    """

    if not c > 0:
        raise InvalidParameterError(f"c must be positive, got {c}")
    _check_index(b, a)
    if b == 1:
        return SharpLaw(
            kind=INDEX_MINUS_ONE,
            c=c,
            b=b,
            a=a,
            constant=math.sqrt(c / (a - 1.0)),
            scalar_ratio_bound=1.0,
            log_power=0.0,
            loglog_power=-(a - 1.0) / 2.0,
        )
    return SharpLaw(
        kind=INDEX_B,
        c=c,
        b=b,
        a=a,
        constant=math.sqrt(c * (b / 2.0) ** (b - 1.0) * b / (b - 1.0)),
        scalar_ratio_bound=math.sqrt((1.0 + 4.0 * c1 * (b - 1.0)) / b),
        log_power=-(b - 1.0) / 2.0,
        loglog_power=-a / 2.0,
    )


def psi(c: float, b: float, a: float, x: float) -> float:
    """psi(x) with e_n^2 ~ const / psi(log n)."""

    _check_index(b, a)
    if x <= 1:
        raise InvalidParameterError(f"psi needs x > 1, got {x}")
    if b == 1:
        return (a - 1.0) * math.log(x) ** (a - 1.0) / c
    return x ** (b - 1.0) * math.log(x) ** a / c


def psi_tilde(c: float, b: float, a: float, y: float) -> float:
    """Asymptotic inverse of psi for b > 1."""

    if b <= 1:
        raise InvalidParameterError(f"psi_tilde needs b > 1, got {b}")
    if y <= 0 or (a != 0 and y <= 1):
        raise InvalidParameterError(f"psi_tilde argument out of range: {y}")
    out = (c * y) ** (1.0 / (b - 1.0))
    if a != 0:
        out *= (math.log(y) / (b - 1.0)) ** (-a / (b - 1.0))
    return out


def rd_via_psi(c: float, b: float, a: float, eps: float) -> float:
    """Epsilon-entropy asymptotics through the inverse of psi."""

    if not 0 < eps < 1:
        raise InvalidParameterError(f"eps must lie in (0, 1), got {eps}")
    return (b / 2.0) * (b / (b - 1.0)) ** (1.0 / (b - 1.0)) * psi_tilde(c, b, a, eps**-2)


def scalar_plan_constant(b: float, c1: float = LIMIT_C1) -> float:
    """Limit of e(scalar plan) * psi(log n)^(1/2)."""

    if b <= 1:
        raise InvalidParameterError(f"need b > 1, got {b}")
    return math.sqrt((b / 2.0) ** (b - 1.0) * (1.0 / (b - 1.0) + 4.0 * c1))


def block_upper_constant(b: float, d: int, cd: float) -> float:
    """Squared upper constant for d-dimensional blocks quantized with constant C(d)."""

    if b <= 1:
        raise InvalidParameterError(f"need b > 1, got {b}")
    if d < 1:
        raise InvalidParameterError(f"block dimension must be >= 1, got {d}")
    return (b / 2.0) ** (b - 1.0) * (1.0 / (b - 1.0) + 4.0 ** (1.0 / d) * cd / d)


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= TRANSCRIPTION_RTOL * max(abs(x), abs(y), 1e-300)


def process_constant(process: Union[str, Process]) -> SharpLaw:
    """Sharp law derived from the spectrum, checked against the published transcription."""

    if isinstance(process, str):
        process = resolve_process(process)
    form = process.asymptotic_form()
    law = sharp_constant(form.c, form.b, form.a)
    published = process.transcribed_law()
    if published is None:
        return law

    if not (
        _close(law.constant, published.constant)
        and abs(law.log_power - published.log_power) <= 1e-12
        and abs(law.loglog_power - published.loglog_power) <= 1e-12
    ):
        log.error(
            "transcription_mismatch",
            process=process.name,
            derived=law.constant,
            published=published.constant,
        )
        raise TranscriptionMismatchError(
            f"{process.name}: derived K={law.constant!r} rate=({law.log_power}, "
            f"{law.loglog_power}) but published K={published.constant!r} rate=("
            f"{published.log_power}, {published.loglog_power})"
        )
    return law


def slack_for(log_n: float) -> float:
    slack = SLACK_SCHEDULE[0][1]
    for grid_point, value in SLACK_SCHEDULE:
        if log_n >= grid_point:
            slack = value
    return slack


def slack_metadata() -> dict:
    return {
        "schedule": {f"{point:g}": value for point, value in SLACK_SCHEDULE},
        "note": SLACK_NOTE,
    }
