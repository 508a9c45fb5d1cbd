import json
import math

import pytest

from funcquant.errors import MalformedGridError
from funcquant.utils import (
    emit,
    merge_dicts,
    parse_grid,
    parse_number,
    parse_squared_grid,
    render_csv,
    render_json,
)


def test_parse_number_forms():
    assert parse_number("sqrt2") == math.sqrt(2)
    assert parse_number(" PI ") == math.pi
    assert parse_number("1e-3") == 1e-3
    with pytest.raises(MalformedGridError):
        parse_number("sqrtx")


def test_log_spaced_grid():
    assert parse_grid("1e2:1e4:3") == pytest.approx([1e2, 1e3, 1e4])
    assert parse_grid("5:9:1") == [5.0]
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]


@pytest.mark.parametrize("text", ["", "1:2", "1:2:x", "0:1:3", "1:2:0", "a,b"])
def test_malformed_grids(text):
    with pytest.raises(MalformedGridError):
        parse_grid(text)


def test_squared_grid_keeps_sqrt_exact():
    assert parse_squared_grid("sqrt2,0.5") == [2.0, 0.25]
    assert parse_squared_grid("1:4:2") == pytest.approx([1.0, 16.0])
    with pytest.raises(MalformedGridError):
        parse_squared_grid(" , ")


def test_render_csv_metadata_header():
    text = render_csv({"version": "0.1.0", "seed": 0}, ["k", "value"], [[1, 0.5], [2, None]])
    lines = text.splitlines()
    assert lines[0] == '# version: "0.1.0"'
    assert lines[1] == "# seed: 0"
    assert lines[2] == "k,value"
    assert lines[3].startswith("1,0.5")
    assert lines[4] == "2,"


def test_render_json_handles_non_finite():
    data = json.loads(render_json({"tool": "funcquant"}, {"x": float("inf"), "y": (1, 2)}))
    assert data == {"metadata": {"tool": "funcquant"}, "result": {"x": "inf", "y": [1, 2]}}


def test_emit_to_file(tmp_path, capsys):
    target = tmp_path / "out" / "result.json"
    emit("{}", target)
    assert target.read_text() == "{}"
    emit("hello", None)
    assert capsys.readouterr().out == "hello\n"


def test_merge_dicts_skips_none():
    assert merge_dicts({"a": 1, "b": 2}, {"b": None, "c": 3}) == {"a": 1, "b": 2, "c": 3}
