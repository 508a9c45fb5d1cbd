import math

import numpy as np
import pytest

from funcquant.errors import InvalidParameterError, UnknownProcessError
from funcquant.processes import build_default_catalog, parse_process_spec, resolve_process
from funcquant.processes.catalog import Sheet
from funcquant.spectra import ExactBM, ExactBridge, RegularVarying


def test_parse_defaults_and_overrides():
    name, params = parse_process_spec("fbm:beta=0.7")
    assert name == "fbm"
    assert params == {"beta": 0.7}
    assert parse_process_spec("fou")[1] == {"a": 1.0, "rho": 1.0}


def test_repeated_keys_collect_into_lists():
    process = resolve_process("ous:a=1,a=2,d=2")
    assert process.params["a"] == [1.0, 2.0]
    assert process.params["d"] == 2


def test_explicit_values():
    process = resolve_process("explicit:4,1")
    assert process.model().eigenvalues(2).tolist() == [4.0, 1.0]
    with pytest.raises(InvalidParameterError):
        resolve_process("explicit")


def test_unknown_and_malformed():
    with pytest.raises(UnknownProcessError) as err:
        resolve_process("levy")
    assert "levy" in str(err.value)
    with pytest.raises(InvalidParameterError):
        resolve_process("fbm:hurst=0.3")
    with pytest.raises(InvalidParameterError):
        resolve_process("ibm:m=1.5")
    with pytest.raises(InvalidParameterError):
        resolve_process("fbm:beta=1.2")
    with pytest.raises(InvalidParameterError):
        resolve_process("ous:a=1,a=2,a=3,d=2")


def test_one_factor_sheets_reduce_to_exact_spectra():
    assert isinstance(resolve_process("bs:d=1").model(), ExactBM)
    assert isinstance(resolve_process("tugged_bs:d=1").model(), ExactBridge)


def test_sheet_requires_factors():
    with pytest.raises(TypeError):
        Sheet("sheet", {"d": 2})


def test_sheet_model_carries_log_power():
    model = resolve_process("fbs:beta=0.3,d=3").model()
    assert isinstance(model, RegularVarying)
    assert model.b == pytest.approx(1.6)
    assert model.a == pytest.approx(-3.2)


def test_tugged_sheet_kernel_is_bridge_product():
    kernel = resolve_process("tugged_bs:d=2").kernel()
    s = np.array([0.3, 0.6])
    t = np.array([0.5, 0.2])
    expected = (0.3 - 0.15) * (0.2 - 0.12)
    assert kernel(s, t) == pytest.approx(expected)


def test_ou_kernel_and_spectrum():
    process = resolve_process("ou:a=2")
    assert process.kernel()(0.1, 0.6) == pytest.approx(math.exp(-1.0))
    assert process.model().c == pytest.approx(4 / math.pi**2)


def test_default_catalog_covers_every_published_law():
    names = {p.name for p in build_default_catalog()}
    assert {"bm", "diffusion", "ou", "fou", "ibm", "fbm", "ous", "fous", "fbs", "bs"} <= names
    assert "tugged_bs" in names
    assert all(p.transcribed_law() is not None for p in build_default_catalog())


def test_describe_echoes_parameters():
    assert resolve_process("fou:a=1.5,rho=0.6").describe() == {
        "process": "fou",
        "a": 1.5,
        "rho": 0.6,
    }
