"""Utility helpers including logging, grids and artifact writers."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import structlog

from .errors import MalformedGridError

FLOAT_FORMAT = ".17g"


def setup_logging(level: str = "INFO") -> None:
    """Configure structured logging on stderr; stdout is reserved for artifacts."""

    numeric = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(level=numeric, stream=sys.stderr)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )


def parse_number(token: str) -> float:
    """Parse a float, also accepting ``sqrtX`` and ``pi``."""

    text = token.strip().lower()
    try:
        if text.startswith("sqrt"):
            return math.sqrt(float(text[4:]))
        if text == "pi":
            return math.pi
        return float(text)
    except ValueError as exc:
        raise MalformedGridError(f"cannot parse number {token!r}") from exc


def parse_grid(text: str) -> List[float]:
    """Parse ``start:stop:steps`` (log-spaced), a comma list, or a single value."""

    text = text.strip()
    if not text:
        raise MalformedGridError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise MalformedGridError(f"grid {text!r} must be start:stop:steps")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        try:
            steps = int(parts[2])
        except ValueError as exc:
            raise MalformedGridError(f"grid {text!r} has a non-integer step count") from exc
        if steps < 1 or start <= 0 or stop <= 0:
            raise MalformedGridError(f"grid {text!r} needs positive endpoints and steps >= 1")
        if steps == 1:
            return [start]
        return [float(v) for v in np.geomspace(start, stop, steps)]
    return [parse_number(tok) for tok in text.split(",") if tok.strip()]


def parse_squared_grid(text: str) -> List[float]:
    """Like :func:`parse_grid` but returns squares; ``sqrtX`` squares to exactly X."""

    if ":" in text:
        return [v * v for v in parse_grid(text)]
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.lower().startswith("sqrt"):
            out.append(parse_number(tok[4:]))
        else:
            v = parse_number(tok)
            out.append(v * v)
    if not out:
        raise MalformedGridError("empty grid")
    return out


def format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, Path):
        return str(value)
    return value


def render_json(metadata: Dict[str, Any], result: Any) -> str:
    return json.dumps(to_jsonable({"metadata": metadata, "result": result}), indent=2)


def render_csv(
    metadata: Dict[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> str:
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {json.dumps(to_jsonable(value))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")


def merge_dicts(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = base.copy()
    merged.update({k: v for k, v in override.items() if v is not None})
    return merged
