import math

import numpy as np
import pytest
from scipy.special import zeta

from funcquant.errors import InvalidParameterError, KernelError
from funcquant.spectra import (
    CovarianceKernel,
    ExactBM,
    ExactBridge,
    ExplicitList,
    RegularVarying,
    bm_kernel,
    bridge_kernel,
    constant_kernel,
    diffusion_kernel,
    eigenvalues,
    fbm_kernel,
    fbm_model,
    ibm_kernel,
    nystrom_eigs,
    ou_model,
    sheet_kernel,
    tail_sum,
    tensor_asymptotic,
    tensor_product_eigs,
)


def test_exact_bm_values_and_trace():
    bm = ExactBM()
    assert bm.eigenvalue(1) == pytest.approx(4 / math.pi**2, rel=1e-15)
    assert bm.eigenvalue(3) == pytest.approx(1 / (math.pi * 2.5) ** 2, rel=1e-15)
    assert tail_sum(bm, 0).value == pytest.approx(0.5, rel=1e-14)
    direct = 0.5 - math.fsum(bm.eigenvalues(1000).tolist())
    assert bm.tail(1000).value == pytest.approx(direct, rel=1e-9)


def test_exact_bridge_trace():
    bridge = ExactBridge()
    assert bridge.tail(0).value == pytest.approx(1 / 6, rel=1e-14)
    assert bridge.eigenvalue(2) == pytest.approx(1 / (4 * math.pi**2))


def test_explicit_list_is_sorted_and_finite():
    spec = ExplicitList((1.0, 4.0))
    assert spec.values == (4.0, 1.0)
    assert spec.support == 2
    assert spec.eigenvalues(5).tolist() == [4.0, 1.0]
    assert spec.tail(1).value == 1.0
    assert spec.tail(7).value == 0.0
    with pytest.raises(InvalidParameterError):
        ExplicitList((1.0, -2.0))


@pytest.mark.parametrize("b", [2.0, 3.0, 1.5])
def test_regular_varying_tail_matches_zeta(b: float):
    model = RegularVarying(1.0, b)
    assert model.tail(0).value == pytest.approx(zeta(b), rel=1e-10)
    assert model.tail(10).value == pytest.approx(zeta(b, 11), rel=1e-10)
    assert model.tail(5000).value == pytest.approx(zeta(b, 5001), rel=1e-9)


def test_regular_varying_tail_differences_with_log_factor():
    model = RegularVarying(2.0, 2.0, -3.0)
    direct = math.fsum(model.values_at(np.arange(21, 26)).tolist())
    assert model.tail(20).value - model.tail(25).value == pytest.approx(direct, rel=1e-9)
    values = model.eigenvalues(200)
    assert np.all(np.diff(values) <= 0)


def test_regular_varying_rejects_divergent_trace():
    with pytest.raises(InvalidParameterError):
        RegularVarying(1.0, 0.9)
    with pytest.raises(InvalidParameterError):
        RegularVarying(1.0, 1.0, 1.0)
    RegularVarying(1.0, 1.0, 2.0)


def test_ou_eigen_constant():
    assert ou_model(2.0).c == pytest.approx(4 / math.pi**2)
    assert ou_model(2.0).b == 2.0


def test_tensor_asymptotic():
    single = tensor_asymptotic([0.3], 2.0, 1)
    assert single.c == pytest.approx(0.3)
    assert single.a == 0.0
    sheet = tensor_asymptotic([0.5, 0.25, 2.0], [2.0, 2.0, 2.0], 3)
    assert sheet.c == pytest.approx(0.25 / 4.0)
    assert sheet.a == pytest.approx(-4.0)
    with pytest.raises(InvalidParameterError):
        tensor_asymptotic([1.0, 1.0], [2.0, 3.0], 2)


def test_tensor_product_eigs():
    top = tensor_product_eigs([np.array([4.0, 1.0]), np.array([1.0, 4.0])], 3)
    assert top.tolist() == [16.0, 4.0, 4.0]


def test_eigenvalues_wrapper_reports_method():
    seq = eigenvalues(fbm_model(0.3), 10)
    assert seq.method == "asymptotic"
    assert seq.values.size == 10


def test_kernels_on_scalars():
    assert bm_kernel()(0.3, 0.7) == pytest.approx(0.3)
    assert bridge_kernel()(0.3, 0.7) == pytest.approx(0.3 - 0.21)
    assert ibm_kernel(0)(0.4, 0.9) == pytest.approx(0.4)
    assert ibm_kernel(1)(1.0, 1.0) == pytest.approx(1 / 3)
    assert fbm_kernel(0.5)(0.2, 0.6) == pytest.approx(0.2)


def test_diffusion_kernel_trace():
    kernel = diffusion_kernel(theta=1.0, sigma2=0.0)
    expected = 0.5 - (1 - math.exp(-2.0)) / 4
    assert kernel.diagonal_integral() == pytest.approx(expected, rel=1e-6)


def test_nystrom_bm_first_twenty():
    values = nystrom_eigs(bm_kernel(), 1000, 20).values
    exact = ExactBM().eigenvalues(20)
    assert np.max(np.abs(values / exact - 1)) < 2e-3


def test_nystrom_fbm_mid_range_decay():
    beta = 0.7
    values = nystrom_eigs(fbm_kernel(beta), 2000, 60).values
    model = fbm_model(beta)
    k = np.arange(30, 61)
    ratio = values[k - 1] * k ** (1 + 2 * beta) / model.c
    assert np.all((ratio > 0.9) & (ratio < 1.1))


def test_nystrom_sheet_is_tensor_product():
    grid = 40
    sheet = nystrom_eigs(sheet_kernel([bm_kernel(), bm_kernel()]), grid, 5).values
    factor = nystrom_eigs(bm_kernel(), grid).values
    assert sheet == pytest.approx(tensor_product_eigs([factor, factor], 5), rel=1e-8)
    assert sheet[0] == pytest.approx(ExactBM().eigenvalue(1) ** 2, rel=1e-2)


def test_nystrom_constant_kernel_is_rank_one():
    values = nystrom_eigs(constant_kernel(), 200, 5).values
    assert values[0] == pytest.approx(1.0, abs=1e-10)
    assert values[1:] == pytest.approx(np.zeros(4), abs=1e-10)


@pytest.mark.parametrize("kernel", [bm_kernel(), bridge_kernel(), diffusion_kernel(2.0, 0.5)], ids=lambda k: k.name)
def test_nystrom_eigenvalues_sum_to_diagonal_integral(kernel):
    values = nystrom_eigs(kernel, 400).values
    assert float(np.sum(values)) == pytest.approx(kernel.diagonal_integral(), abs=1e-3)


def test_nystrom_rejects_bad_kernels():
    asymmetric = CovarianceKernel("skew", (lambda s, t: s + 0 * t,))
    with pytest.raises(KernelError):
        nystrom_eigs(asymmetric, 20)
    negative = CovarianceKernel("negative", (lambda s, t: -np.minimum(s, t),))
    with pytest.raises(KernelError):
        nystrom_eigs(negative, 20)
