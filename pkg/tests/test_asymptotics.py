import math

import pytest

from funcquant.allocation import allocate, critical_dim, lower_bound, plan_distortion
from funcquant.asymptotics import (
    INDEX_B,
    INDEX_MINUS_ONE,
    block_upper_constant,
    process_constant,
    psi,
    psi_tilde,
    rd_via_psi,
    scalar_plan_constant,
    sharp_constant,
    slack_for,
    slack_metadata,
)
from funcquant.errors import InvalidParameterError, TranscriptionMismatchError
from funcquant.processes import LawForm, build_default_catalog, resolve_process
from funcquant.processes.catalog import BrownianMotion
from funcquant.rate_distortion import rd_asymptotic
from funcquant.scalar_quantizer import LIMIT_C1, ScalarQuantizerCache
from funcquant.spectra import ExactBM, RegularVarying

BM_K = math.sqrt(2) / math.pi


def test_bm_and_ou_constants():
    assert sharp_constant(math.pi**-2, 2.0).constant == pytest.approx(BM_K, rel=1e-14)
    ou = sharp_constant(2 * 3.0 / math.pi**2, 2.0)
    assert ou.constant == pytest.approx(2 * math.sqrt(3.0) / math.pi, rel=1e-14)
    assert ou.kind == INDEX_B
    assert ou.log_power == -0.5


def test_constant_blows_up_near_index_one():
    assert sharp_constant(1.0, 1.0001).constant > 50


def test_index_minus_one_form():
    law = sharp_constant(2.0, 1.0, 3.0)
    assert law.kind == INDEX_MINUS_ONE
    assert law.constant == pytest.approx(1.0)
    assert law.loglog_power == pytest.approx(-1.0)
    assert law.scalar_ratio_bound == 1.0
    assert law.predicted(math.e) == pytest.approx(1.0)
    assert psi(2.0, 1.0, 3.0, math.e**2) == pytest.approx(4.0)


def test_divergent_trace_rejected():
    with pytest.raises(InvalidParameterError):
        sharp_constant(1.0, 0.5)
    with pytest.raises(InvalidParameterError):
        sharp_constant(1.0, 1.0, 0.5)


def test_rate_needs_log_n_above_one_only_with_loglog_term():
    with pytest.raises(InvalidParameterError):
        sharp_constant(1.0, 2.0, 1.0).rate(1.0)
    with pytest.raises(InvalidParameterError):
        sharp_constant(1.0, 2.0).rate(0.0)
    assert sharp_constant(1.0, 2.0).rate(0.5) == pytest.approx(0.5**-0.5)
    assert sharp_constant(1.0, 2.0).rate(1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("process", build_default_catalog(), ids=lambda p: p.name)
def test_transcriptions_agree_with_spectra(process):
    law = process_constant(process)
    assert law.constant > 0


def test_three_dimensional_sheets_agree():
    for spec in ("ous:a=2,d=3", "fous:a=1,a=2,a=0.5,rho=1.3,d=3", "fbs:beta=0.8,d=3", "bs:d=4"):
        assert process_constant(spec).constant > 0


def test_named_special_cases():
    assert process_constant("fbm:beta=0.5").constant == pytest.approx(BM_K, rel=1e-12)
    assert process_constant("bs:d=1").constant == pytest.approx(BM_K, rel=1e-12)
    assert process_constant("diffusion").constant == pytest.approx(BM_K, rel=1e-12)
    ibm = process_constant("ibm:m=1")
    expected = math.pi**-2 * 2**1.5 * (4 / 3) ** 0.5
    assert ibm.constant == pytest.approx(expected, rel=1e-12)
    assert ibm.log_power == pytest.approx(-1.5)


def test_regvar_has_no_transcription_but_a_law():
    law = process_constant("regvar:c=1,b=3")
    assert law.constant == pytest.approx(math.sqrt(1.5**2 * 1.5))


def test_mismatched_transcription_raises():
    class Broken(BrownianMotion):
        def transcribed_law(self) -> LawForm:
            return LawForm(0.5, -0.5)

    with pytest.raises(TranscriptionMismatchError):
        process_constant(Broken("bm"))


def test_psi_tilde_inverts_psi():
    assert psi_tilde(1.0, 2.0, 0.0, 123.0) == pytest.approx(123.0)
    for x in (1e2, 1e4, 1e6):
        assert psi_tilde(0.7, 3.0, 0.0, psi(0.7, 3.0, 0.0, x)) / x == pytest.approx(1.0, rel=1e-12)
    ratios = [psi_tilde(1.0, 3.0, 1.0, psi(1.0, 3.0, 1.0, x)) / x for x in (1e2, 1e4, 1e6)]
    assert ratios[0] < ratios[1] < ratios[2] < 1.0
    with pytest.raises(InvalidParameterError):
        psi_tilde(1.0, 1.0, 0.0, 10.0)


@pytest.mark.parametrize("c,b,a", [(math.pi**-2, 2.0, 0.0), (0.3, 2.5, -1.0), (1.0, 3.0, 0.5)])
def test_entropy_pipeline_matches_closed_form(c, b, a):
    for eps in (0.1, 0.01):
        assert rd_via_psi(c, b, a, eps) == pytest.approx(rd_asymptotic(c, b, a, eps), rel=1e-12)


def test_scalar_constants_are_consistent():
    for b in (1.5, 2.0, 3.0):
        law = sharp_constant(1.0, b)
        ratio = scalar_plan_constant(b) / math.sqrt((b / 2) ** (b - 1) * b / (b - 1))
        assert ratio == pytest.approx(law.scalar_ratio_bound, rel=1e-12)
        assert block_upper_constant(b, 1, LIMIT_C1) == pytest.approx(
            scalar_plan_constant(b) ** 2, rel=1e-12
        )


def test_slack_schedule():
    assert slack_for(50.0) == 0.5
    assert slack_for(1e3) == 0.25
    assert slack_for(1e4) == 0.10
    assert "note" in slack_metadata()


@pytest.mark.parametrize(
    "process",
    [p for p in build_default_catalog() if p.asymptotic_form().a == 0],
    ids=lambda p: p.name,
)
@pytest.mark.parametrize("log_n", [1e2, 1e3, 1e4])
def test_lower_bound_approaches_sharp_law(process, log_n):
    law = process_constant(process)
    ratio = lower_bound(process.model(), log_n) / law.predicted(log_n) ** 2
    assert 0.5 < ratio < 1.05


@pytest.mark.parametrize(
    "process",
    [p for p in build_default_catalog() if p.asymptotic_form().a != 0],
    ids=lambda p: p.name,
)
def test_sheet_lower_bound_converges_to_law(process):
    law = process_constant(process)
    model = process.model()
    ratios = [lower_bound(model, log_n) / law.predicted(log_n) ** 2 for log_n in (1e2, 1e3, 1e4)]
    gaps = [abs(r - 1.0) for r in ratios]
    assert gaps[2] <= gaps[0] + 0.02
    assert gaps[2] < 0.3
    if min(ratios) > 1.0:
        assert ratios[0] > ratios[1] > ratios[2]


@pytest.mark.parametrize("model,b", [(ExactBM(), 2.0), (RegularVarying(1.0, 3.0), 3.0)])
def test_finite_n_sharp_constant_check(model, b):
    log_n = 1e4
    c = math.pi**-2 if b == 2.0 else 1.0
    scaled = lower_bound(model, log_n) * psi(c, b, 0.0, log_n) / ((b / 2) ** (b - 1) * b / (b - 1))
    assert 0.75 < scaled < 1.05
    assert critical_dim(model, log_n) * b / (2 * log_n) == pytest.approx(1.0, abs=0.05)


def test_scalar_plan_overhead_within_bound():
    log_n = 1e4
    law = sharp_constant(math.pi**-2, 2.0)
    plan = allocate(ExactBM(), log_n=log_n)
    error = math.sqrt(plan_distortion(plan, ExactBM(), ScalarQuantizerCache()).total)
    assert error / law.predicted(log_n) <= law.scalar_ratio_bound * (1 + slack_for(log_n))
