import json
from pathlib import Path

import pytest
import structlog
from typer.testing import CliRunner

from funcquant.cli import app

GOLDEN = Path(__file__).parent / "golden"
runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    for key in ("FUNCQUANT_CACHE_DIR", "FUNCQUANT_SEED", "FUNCQUANT_WORKERS", "FUNCQUANT_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    yield
    structlog.reset_defaults()


def invoke(tmp_path, *args):
    return runner.invoke(app, [*args, "--config", str(tmp_path / "missing.yaml")])


def result_of(res):
    assert res.exit_code == 0, res.output
    return json.loads(res.stdout)


def assert_close(actual, expected, rel=1e-9):
    if isinstance(expected, dict):
        assert set(actual) == set(expected)
        for key in expected:
            assert_close(actual[key], expected[key], rel)
    elif isinstance(expected, list):
        assert len(actual) == len(expected)
        for a, e in zip(actual, expected):
            assert_close(a, e, rel)
    elif isinstance(expected, float):
        assert actual == pytest.approx(expected, rel=rel, abs=1e-15)
    else:
        assert actual == expected


def test_constants_bm_golden(tmp_path):
    out = result_of(invoke(tmp_path, "constants", "--process", "bm"))
    expected = json.loads((GOLDEN / "constants_bm.json").read_text())
    assert_close(out["result"], expected, rel=1e-9)
    assert out["metadata"]["tool"] == "funcquant"
    assert out["metadata"]["process"] == {"process": "bm"}
    assert "note" in out["metadata"]["slack"]


def test_rd_explicit_golden(tmp_path):
    out = result_of(invoke(tmp_path, "rd", "-p", "explicit:4,1", "--eps-grid", "sqrt2"))
    expected = json.loads((GOLDEN / "rd_explicit.json").read_text())
    assert_close(out["result"], expected)
    assert out["metadata"]["eps_grid"] == "sqrt2"


def test_rd_invert(tmp_path):
    out = result_of(
        invoke(tmp_path, "rd", "-p", "explicit:4,1", "--invert", "--rate", "0.6931471805599453")
    )
    assert out["result"]["eps"] == pytest.approx(2**0.5, rel=1e-8)


def test_design_integer_budget(tmp_path):
    out = result_of(invoke(tmp_path, "design", "-p", "bm", "--n", "3"))
    assert out["result"]["m"] == 2
    assert out["result"]["levels"] == [3, 1]
    assert out["result"]["distortion"]["total"] == pytest.approx(0.171789, abs=1e-5)
    assert out["metadata"]["exactness"] == "exact"


def test_design_log_budget(tmp_path):
    out = result_of(invoke(tmp_path, "design", "-p", "bm", "--log-n", "1.0986"))
    assert out["result"]["m"] == 1
    assert out["result"]["levels"] == [2]


def test_design_needs_a_budget(tmp_path):
    assert invoke(tmp_path, "design", "-p", "bm").exit_code == 4


def test_csv_output_carries_metadata(tmp_path):
    res = invoke(tmp_path, "scalar", "--k", "2", "--format", "csv")
    assert res.exit_code == 0, res.output
    lines = res.stdout.splitlines()
    assert any(line.startswith("# version:") for line in lines)
    header = lines.index("k,distortion,k2_distortion,residual")
    assert lines[header + 1].startswith("2,0.36338")


def test_output_file(tmp_path):
    target = tmp_path / "artifacts" / "eigs.json"
    res = invoke(tmp_path, "eigs", "-p", "bm", "--count", "3", "--output", str(target))
    assert res.exit_code == 0, res.output
    data = json.loads(target.read_text())
    assert data["result"]["method"] == "exact"
    assert len(data["result"]["values"]) == 3


@pytest.mark.parametrize(
    "args,code",
    [
        (("constants", "-p", "levy"), 3),
        (("compare", "-p", "bm", "--log-n-grid", "1:2"), 5),
        (("mc", "smallball", "-p", "bm", "--truncation", "5", "--eps-grid", "0.3"), 7),
        (("constants", "-p", "fbm:hurst=0.3"), 4),
        (("constants", "-p", "bm", "--format", "xml"), 2),
    ],
)
def test_exit_codes(tmp_path, args, code):
    assert invoke(tmp_path, *args).exit_code == code


def test_compare_accepts_small_log_n_without_loglog_term(tmp_path):
    rows = result_of(invoke(tmp_path, "compare", "-p", "bm", "--log-n-grid", "0.5,1"))["result"]
    assert [row["log_n"] for row in rows] == [0.5, 1.0]
    assert rows[0]["predicted"] == pytest.approx(2 / 3.141592653589793**2 / 0.5)
    assert all(row["m"] == 1 for row in rows)


def test_compare_rejects_small_log_n_with_loglog_term(tmp_path):
    assert invoke(tmp_path, "compare", "-p", "fbs:beta=0.3", "--log-n-grid", "0.5").exit_code == 4


def test_init_writes_config(tmp_path):
    path = tmp_path / "config.yaml"
    res = runner.invoke(app, ["init", "--config-path", str(path)])
    assert res.exit_code == 0
    assert path.exists()
    assert "seed: 0" in path.read_text()


def test_doctor(tmp_path):
    res = invoke(tmp_path, "doctor")
    assert res.exit_code == 0
    assert "Doctor" in res.output
    assert "numpy" in res.output


def test_eigs_methods(tmp_path):
    exact = result_of(invoke(tmp_path, "eigs", "-p", "bm", "--count", "4"))
    assert exact["result"]["values"][0] == pytest.approx(4 / 3.141592653589793**2)
    asym = result_of(invoke(tmp_path, "eigs", "-p", "fbm:beta=0.7", "--method", "asymptotic"))
    assert asym["metadata"]["exactness"] == "asymptotic"
    assert invoke(tmp_path, "eigs", "-p", "fbm:beta=0.7", "--method", "exact").exit_code == 4
    nys = result_of(
        invoke(tmp_path, "eigs", "-p", "bm", "--count", "3", "--method", "nystrom", "--grid", "200")
    )
    assert nys["result"]["values"][0] == pytest.approx(4 / 3.141592653589793**2, rel=1e-3)


def test_scalar_levels_alias(tmp_path):
    out = result_of(invoke(tmp_path, "scalar", "--levels", "1"))
    assert out["result"]["codepoints"] == [0.0]
    assert out["result"]["distortion"] == pytest.approx(1.0)
