"""funcquant command-line interface."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import structlog
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .allocation import allocate, lower_bound, materialize_plan, plan_distortion, upper_bound
from .asymptotics import process_constant, sharp_constant, slack_for, slack_metadata
from .config import Config, RunConfig, default_config_path, load_config, write_default_config
from .db import CodebookStore
from .errors import FuncQuantError, InvalidParameterError
from .models import APPROXIMATE_UPPER, EXACT
from .montecarlo import empirical_distortion, sample_paths, small_ball
from .processes import Process, resolve_process
from .rate_distortion import (
    distortion_rate,
    flood,
    rd_asymptotic,
    reproducing_gap,
    sample_reproducing,
    waterfill,
)
from .scalar_quantizer import LIMIT_C1, ScalarQuantizerCache, c1_scan
from .spectra import RegularVarying, nystrom_eigs
from .utils import (
    emit,
    merge_dicts,
    parse_grid,
    parse_squared_grid,
    render_csv,
    render_json,
    setup_logging,
)
from .vector_quantizer import VectorQuantizerCache, estimate_cd, train_vq, zador_tail

app = typer.Typer(help="Functional quantization of Gaussian processes")
mc_app = typer.Typer(help="Monte Carlo oracles")
app.add_typer(mc_app, name="mc")
console = Console()
err_console = Console(stderr=True)
log = structlog.get_logger(__name__)


@dataclass
class Report:
    """What one subcommand computed: a JSON payload plus a flat table for CSV."""

    result: Any
    columns: List[str]
    rows: List[Sequence[Any]]
    metadata: Dict[str, Any] = field(default_factory=dict)


def _param(rc: RunConfig, key: str, default: Any = None) -> Any:
    value = rc.params.get(key)
    return default if value is None else value


def _process(rc: RunConfig) -> Process:
    if not rc.process:
        raise InvalidParameterError(f"{rc.subcommand} needs --process")
    return resolve_process(rc.process)


def _sharp_or_none(process: Process):
    try:
        form = process.asymptotic_form()
        return sharp_constant(form.c, form.b, form.a)
    except InvalidParameterError:
        return None


def _budget(rc: RunConfig) -> Dict[str, Any]:
    n, log_n = rc.params.get("n"), rc.params.get("log_n")
    if n is None and log_n is None:
        raise InvalidParameterError("give a budget with --n or --log-n")
    return {"n": n, "log_n": None if n is not None else log_n}


def compare_report(
    process: Process,
    log_n_grid: Sequence[float],
    scalar_cache: Optional[ScalarQuantizerCache] = None,
) -> List[Dict[str, Any]]:
    """Predicted e_n^2 next to the lower bound, the scalar plan and the upper bound."""

    form = process.asymptotic_form()
    law = sharp_constant(form.c, form.b, form.a)
    model = process.model()
    rows = []
    for log_n in log_n_grid:
        predicted = law.predicted(log_n) ** 2
        plan = allocate(model, log_n=log_n, d=1)
        exact = plan_distortion(plan, model, scalar_cache).total
        low = lower_bound(model, log_n)
        high = upper_bound(model, log_n, 1, LIMIT_C1)
        rows.append(
            {
                "log_n": log_n,
                "m": plan.m,
                "predicted": predicted,
                "lower": low,
                "plan": exact,
                "upper": high,
                "lower_ratio": low / predicted,
                "plan_ratio": exact / predicted,
                "upper_ratio": high / predicted,
                "slack": slack_for(log_n),
            }
        )
    return rows


def _scalar(rc: RunConfig, cfg: Config) -> Report:
    cache = ScalarQuantizerCache.from_config(cfg)
    k = _param(rc, "k")
    if k is not None:
        q = cache.get(k)
        row = [q.levels, q.distortion, q.levels**2 * q.distortion, q.stationarity_residual]
        return Report(
            result=q.as_dict(),
            columns=["k", "distortion", "k2_distortion", "residual"],
            rows=[row],
            metadata={"exactness": EXACT},
        )
    rows = c1_scan(_param(rc, "k_max", 100), cache)
    valid = [r.value for r in rows if r.valid]
    return Report(
        result={
            "rows": [r.as_dict() for r in rows],
            "sup": max(valid) if valid else None,
            "limit": LIMIT_C1,
        },
        columns=["k", "value", "running_sup", "valid"],
        rows=[[r.k, r.value, r.running_sup, r.valid] for r in rows],
        metadata={"exactness": EXACT},
    )


def _vq(rc: RunConfig, cfg: Config) -> Report:
    d = _param(rc, "dim", 2)
    samples = _param(rc, "samples", cfg.vq_train_samples)
    eval_samples = _param(rc, "eval_samples", cfg.vq_eval_samples)
    k = _param(rc, "levels")
    if k is not None:
        vq = train_vq(d, k, samples, rc.seed, cfg.vq_restarts, eval_samples, cfg.workers)
        est = vq.distortion_estimate
        return Report(
            result=vq.as_dict(),
            columns=["dim", "k", "distortion", "stderr", "scaled"],
            rows=[[d, k, est.value, est.stderr, k ** (2.0 / d) * est.value]],
            metadata={"exactness": APPROXIMATE_UPPER},
        )
    rows = estimate_cd(
        d,
        _param(rc, "k_max", 8),
        samples=samples,
        seed=rc.seed,
        restarts=cfg.vq_restarts,
        eval_samples=eval_samples,
        workers=cfg.workers,
    )
    value, stderr = zador_tail(rows)
    return Report(
        result={
            "dim": d,
            "rows": [r.as_dict() for r in rows],
            "quantization_coefficient": {"value": value, "stderr": stderr},
        },
        columns=["k", "value", "stderr", "running_sup", "valid"],
        rows=[[r.k, r.value, r.stderr, r.running_sup, r.valid] for r in rows],
        metadata={"exactness": APPROXIMATE_UPPER},
    )


def _eigs(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    count = _param(rc, "count", 20)
    method = _param(rc, "method", model.method)
    grid = _param(rc, "grid")
    if method == "nystrom":
        values = nystrom_eigs(process.kernel(), grid or cfg.nystrom_grid, count).values
    elif method == "asymptotic":
        form = process.asymptotic_form()
        values = RegularVarying(form.c, form.b, form.a).eigenvalues(count)
    elif method == "exact":
        if model.method != "exact":
            raise InvalidParameterError(f"{process.name} has no exact spectrum; use asymptotic")
        values = model.eigenvalues(count)
    else:
        raise InvalidParameterError(f"unknown method {method!r}; use exact, asymptotic or nystrom")

    numeric = None
    if grid is not None and method != "nystrom":
        numeric = nystrom_eigs(process.kernel(), grid, count).values
    table = []
    for j, lam in enumerate(values.tolist(), start=1):
        nys = float(numeric[j - 1]) if numeric is not None and j <= numeric.size else None
        table.append([j, lam, method, nys, nys / lam if nys is not None else None])
    return Report(
        result={
            "method": method,
            "values": values,
            "nystrom": numeric,
            "trace": model.tail(0).value,
        },
        columns=["k", "lambda", "method", "nystrom", "ratio"],
        rows=table,
        metadata={"exactness": EXACT if method == "exact" else method},
    )


def _design(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    d = _param(rc, "block_dim", 1)
    scalar_cache = ScalarQuantizerCache.from_config(cfg)
    vq_cache = VectorQuantizerCache.from_config(cfg, seed=rc.seed)
    plan = allocate(model, d=d, **_budget(rc))
    dist = plan_distortion(plan, model, scalar_cache, vq_cache)
    result = plan.as_dict()
    result["distortion"] = dist.as_dict()
    result["r_proxy"] = waterfill(model, math.sqrt(dist.total)).r
    if d == 1:
        result["lower"] = lower_bound(model, plan.log_n)
        result["upper"] = upper_bound(model, plan.log_n)
    if _param(rc, "materialize", False):
        result["codebooks"] = [
            q.as_dict() for q in materialize_plan(plan, scalar_cache, vq_cache)
        ]
    return Report(
        result=result,
        columns=["j", "block_eig", "level"],
        rows=[
            [j, nu, int(level)]
            for j, (nu, level) in enumerate(zip(plan.block_eigs.tolist(), plan.levels), start=1)
        ],
        metadata={
            "exactness": plan.exactness,
            "m": plan.m,
            "distortion": dist.total,
            "r_proxy": result["r_proxy"],
        },
    )


def _rd(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    if _param(rc, "invert", False):
        rate = _param(rc, "rate")
        if rate is None:
            raise InvalidParameterError("--invert needs --rate")
        eps = distortion_rate(model, rate)
        return Report(
            result={"R": rate, "eps": eps},
            columns=["R", "eps"],
            rows=[[rate, eps]],
            metadata={"exactness": EXACT},
        )
    if not rc.eps_grid:
        raise InvalidParameterError("rd needs --eps-grid (or --invert --rate)")
    law = _sharp_or_none(process)
    rows, table = [], []
    for dist in parse_squared_grid(rc.eps_grid):
        solution = flood(model, dist)
        closed = None
        if law is not None and law.b > 1 and solution.eps < 1:
            closed = rd_asymptotic(law.c, law.b, law.a, solution.eps)
        ratio = solution.rate / closed if closed else None
        rows.append({**solution.as_dict(), "asymptotic": closed, "ratio": ratio})
        table.append([solution.eps, solution.r, solution.theta, solution.rate, closed, ratio])
    return Report(
        result=rows,
        columns=["eps", "r", "theta", "R", "asymptotic", "ratio"],
        rows=table,
        metadata={"exactness": EXACT},
    )


def _constants(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    law = process_constant(process)
    published = process.transcribed_law() is not None
    result = {**law.as_dict(), "transcription_checked": published}
    return Report(
        result=result,
        columns=list(result),
        rows=[list(result.values())],
        metadata={"slack": slack_metadata()},
    )


def _compare(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    if not rc.log_n_grid:
        raise InvalidParameterError("compare needs --log-n-grid")
    grid = parse_grid(rc.log_n_grid)
    rows = compare_report(process, grid, ScalarQuantizerCache.from_config(cfg))
    columns = list(rows[0]) if rows else []
    return Report(
        result=rows,
        columns=columns,
        rows=[[row[c] for c in columns] for row in rows],
        metadata={"exactness": EXACT, "slack": slack_metadata()},
    )


def _mc_distortion(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    d = _param(rc, "block_dim", 1)
    scalar_cache = ScalarQuantizerCache.from_config(cfg)
    vq_cache = VectorQuantizerCache.from_config(cfg, seed=rc.seed)
    plan = allocate(model, d=d, **_budget(rc))
    truncation = max(_param(rc, "truncation", 0), plan.m * d)
    # coordinates beyond the truncation enter through the exact tail sum
    batch = sample_paths(
        model,
        truncation,
        _param(rc, "samples", cfg.mc_samples),
        rc.seed,
        bias_budget=1.0,
        block_size=cfg.mc_block_size,
        workers=cfg.workers,
    )
    estimate = empirical_distortion(
        plan, batch, scalar_cache, vq_cache, cfg.mc_block_size, cfg.workers
    )
    analytic = plan_distortion(plan, model, scalar_cache, vq_cache)
    result = {
        "estimate": estimate.as_dict(),
        "analytic": analytic.as_dict(),
        "covers": estimate.covers(analytic.total),
        "truncation": batch.truncation,
        "truncation_bias": batch.truncation_bias,
    }
    return Report(
        result=result,
        columns=["estimate", "stderr", "samples", "analytic", "covers", "truncation"],
        rows=[
            [
                estimate.value,
                estimate.stderr,
                estimate.samples,
                analytic.total,
                result["covers"],
                batch.truncation,
            ]
        ],
        metadata={"exactness": analytic.exactness, "m": plan.m},
    )


def _mc_smallball(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    if not rc.eps_grid:
        raise InvalidParameterError("mc smallball needs --eps-grid")
    law = _sharp_or_none(process)
    lower_factor = None
    if law is not None and law.b > 1:
        lower_factor = (law.b / (law.b + 1.0)) ** (law.b / (law.b - 1.0))
    rows, table = [], []
    for eps in parse_grid(rc.eps_grid):
        est = small_ball(
            model,
            eps,
            _param(rc, "truncation"),
            _param(rc, "samples", cfg.mc_samples),
            rc.seed,
            block_size=cfg.mc_block_size,
            workers=cfg.workers,
        )
        rate = waterfill(model, eps).rate
        lower = lower_factor * rate if lower_factor is not None else None
        rows.append({**est.as_dict(), "R": rate, "lower_sandwich": lower})
        table.append([eps, est.value, est.stderr, est.hits, rate, lower, est.truncation])
    return Report(
        result=rows,
        columns=["eps", "F", "stderr", "hits", "R", "lower_sandwich", "truncation"],
        rows=table,
        metadata={
            "exactness": "monte-carlo",
            "bias_direction": rows[0]["bias_direction"] if rows else None,
        },
    )


def _mc_reproducing(rc: RunConfig, cfg: Config) -> Report:
    process = _process(rc)
    model = process.model()
    if not rc.eps_grid:
        raise InvalidParameterError("mc reproducing needs --eps-grid")
    rows, table = [], []
    for eps in parse_grid(rc.eps_grid):
        sample = sample_reproducing(model, eps, _param(rc, "samples", 100_000), rc.seed)
        gap = reproducing_gap(sample)
        covers = gap.covers(eps * eps)
        rows.append({"eps": eps, "r": sample.solution.r, "gap": gap.as_dict(), "covers": covers})
        table.append([eps, sample.solution.r, gap.value, gap.stderr, eps * eps, covers])
    return Report(
        result=rows,
        columns=["eps", "r", "gap", "stderr", "eps2", "covers"],
        rows=table,
        metadata={"exactness": "monte-carlo"},
    )


HANDLERS: Dict[str, Callable[[RunConfig, Config], Report]] = {
    "scalar": _scalar,
    "vq": _vq,
    "eigs": _eigs,
    "design": _design,
    "rd": _rd,
    "constants": _constants,
    "compare": _compare,
    "mc-distortion": _mc_distortion,
    "mc-smallball": _mc_smallball,
    "mc-reproducing": _mc_reproducing,
}


def _metadata(rc: RunConfig, report: Report) -> Dict[str, Any]:
    header: Dict[str, Any] = {
        "tool": "funcquant",
        "version": __version__,
        "subcommand": rc.subcommand,
        "seed": rc.seed,
        "params": {k: v for k, v in rc.params.items() if v is not None},
    }
    if rc.process:
        process = resolve_process(rc.process)
        header["process"] = process.describe()
        header["model"] = process.model().describe()
    if rc.log_n_grid:
        header["log_n_grid"] = rc.log_n_grid
    if rc.eps_grid:
        header["eps_grid"] = rc.eps_grid
    return merge_dicts(header, report.metadata)


def run(rc: RunConfig, config: Optional[Config] = None) -> int:
    """Execute one invocation and emit its artifact; returns the exit status."""

    cfg = config or Config()
    try:
        handler = HANDLERS.get(rc.subcommand)
        if handler is None:
            raise InvalidParameterError(f"unknown subcommand {rc.subcommand!r}")
        report = handler(rc, cfg)
        metadata = _metadata(rc, report)
        if rc.output_format == "csv":
            text = render_csv(metadata, report.columns, report.rows)
        else:
            text = render_json(metadata, report.result)
        emit(text, rc.output)
    except FuncQuantError as exc:
        log.debug("run_failed", subcommand=rc.subcommand, error=str(exc))
        err_console.print(f"[red]{exc}[/red]")
        return exc.exit_code
    return 0


def _invoke(
    subcommand: str,
    config_path: Optional[Path],
    seed: Optional[int],
    fmt: str,
    output: Optional[Path],
    process: Optional[str] = None,
    log_n_grid: Optional[str] = None,
    eps_grid: Optional[str] = None,
    **params: Any,
) -> None:
    cfg = load_config(config_path)
    setup_logging(cfg.log_level)
    try:
        rc = RunConfig(
            subcommand=subcommand,
            process=process,
            params=params,
            log_n_grid=log_n_grid,
            eps_grid=eps_grid,
            seed=cfg.seed if seed is None else seed,
            output_format=fmt,
            output=output,
        )
    except ValidationError as exc:
        err_console.print(f"[red]{exc}[/red]")
        raise typer.Exit(code=2) from exc
    code = run(rc, cfg)
    if code:
        raise typer.Exit(code=code)


ConfigOpt = typer.Option(None, "--config", help="Config path")
SeedOpt = typer.Option(None, "--seed", help="Seed (defaults to the config seed)")
FormatOpt = typer.Option("json", "--format", help="json or csv")
OutputOpt = typer.Option(None, "--output", "-o", help="Write the artifact here instead of stdout")
ProcessOpt = typer.Option(..., "--process", "-p", help="Catalog entry, e.g. fbm:beta=0.7")


@app.command()
def init(config_path: Optional[Path] = typer.Option(None, help="Path to config.yaml")) -> None:
    """Create a default configuration file."""

    cfg_path = write_default_config(config_path)
    console.print(f"Config written to {cfg_path}")


@app.command()
def doctor(config: Optional[Path] = ConfigOpt) -> None:
    """Run environment checks."""

    cfg = load_config(config)
    table = Table(title="Doctor")
    table.add_column("Check")
    table.add_column("Status")
    table.add_column("Details")

    cfg_path = config or default_config_path()
    table.add_row("Config", "OK" if cfg_path.exists() else "DEFAULTS", str(cfg_path))

    if cfg.cache_dir is None:
        table.add_row("Cache dir", "UNSET", "codebooks are kept in memory only")
    else:
        table.add_row("Cache dir", "OK" if cfg.cache_dir.exists() else "NEW", str(cfg.cache_dir))
        db_path = cfg.cache_dir / "codebooks.db"
        if db_path.exists():
            store = CodebookStore(db_path)
            details = f"{store.count()} codebooks, largest k={store.max_levels()}"
            store.close()
            table.add_row("Codebook DB", "OK", details)
        else:
            table.add_row("Codebook DB", "NEW", str(db_path))

    for package in ("numpy", "scipy", "scikit-learn"):
        try:
            table.add_row(package, "OK", version(package))
        except PackageNotFoundError:
            table.add_row(package, "MISSING", "pip install " + package)

    console.print(table)


@app.command()
def scalar(
    k: Optional[int] = typer.Option(None, "--k", "--levels", help="Solve one quantizer"),
    k_max: int = typer.Option(100, help="Scan k = 1..k_max"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Optimal scalar quantizers of N(0,1) and the k^2 e_k^2 table."""

    _invoke("scalar", config, seed, fmt, output, k=k, k_max=k_max)


@app.command()
def vq(
    dim: int = typer.Option(2, help="Block dimension d"),
    levels: Optional[int] = typer.Option(None, help="Train a single k-level codebook"),
    k_max: int = typer.Option(8, help="Train k = 1..k_max"),
    samples: Optional[int] = typer.Option(None, help="Training draws"),
    eval_samples: Optional[int] = typer.Option(None, help="Evaluation draws"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Trained codebooks for N(0, I_d) and the k^(2/d) e_k^2 table."""

    _invoke(
        "vq", config, seed, fmt, output, dim=dim, levels=levels, k_max=k_max, samples=samples,
        eval_samples=eval_samples,
    )


@app.command()
def eigs(
    process: str = ProcessOpt,
    count: int = typer.Option(20, help="Number of eigenvalues"),
    method: Optional[str] = typer.Option(None, help="exact, asymptotic or nystrom"),
    grid: Optional[int] = typer.Option(None, help="Nystrom grid size"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Eigenvalues of a catalog process, optionally against Nystrom."""

    _invoke(
        "eigs", config, seed, fmt, output, process=process, count=count, method=method, grid=grid,
    )


@app.command()
def design(
    process: str = ProcessOpt,
    n: Optional[int] = typer.Option(None, help="Integer level budget"),
    log_n: Optional[float] = typer.Option(None, help="Budget as log n"),
    block_dim: int = typer.Option(1, help="Block dimension d"),
    materialize: bool = typer.Option(False, help="Emit every block codebook"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Allocate levels across KL coordinates and report the plan distortion."""

    _invoke(
        "design", config, seed, fmt, output, process=process, n=n, log_n=log_n,
        block_dim=block_dim, materialize=materialize,
    )


@app.command()
def rd(
    process: str = ProcessOpt,
    eps_grid: Optional[str] = typer.Option(None, help="eps values: start:stop:steps or a list"),
    invert: bool = typer.Option(False, help="Solve for eps at a given rate"),
    rate: Optional[float] = typer.Option(None, help="Rate in nats for --invert"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Epsilon-entropy by water-filling."""

    _invoke(
        "rd", config, seed, fmt, output, process=process, eps_grid=eps_grid, invert=invert,
        rate=rate,
    )


@app.command()
def constants(
    process: str = ProcessOpt,
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Sharp constant and rate exponents of a catalog process."""

    _invoke("constants", config, seed, fmt, output, process=process)


@app.command()
def compare(
    process: str = ProcessOpt,
    log_n_grid: str = typer.Option("1e2:1e4:3", help="log n values: start:stop:steps or a list"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Predicted sharp curve against the bounds and the scalar plan."""

    _invoke("compare", config, seed, fmt, output, process=process, log_n_grid=log_n_grid)


@mc_app.command("distortion")
def mc_distortion(
    process: str = ProcessOpt,
    n: Optional[int] = typer.Option(None, help="Integer level budget"),
    log_n: Optional[float] = typer.Option(None, help="Budget as log n"),
    block_dim: int = typer.Option(1, help="Block dimension d"),
    samples: Optional[int] = typer.Option(None, help="Sample paths"),
    truncation: Optional[int] = typer.Option(None, help="Sampled KL coordinates"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Empirical distortion of a product plan."""

    _invoke(
        "mc-distortion", config, seed, fmt, output, process=process, n=n, log_n=log_n,
        block_dim=block_dim, samples=samples, truncation=truncation,
    )


@mc_app.command("smallball")
def mc_smallball(
    process: str = ProcessOpt,
    eps_grid: str = typer.Option(..., help="Radii: start:stop:steps or a list"),
    samples: Optional[int] = typer.Option(None, help="Sample paths"),
    truncation: Optional[int] = typer.Option(None, help="Sampled KL coordinates"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """Small-ball function -log P(||X|| <= eps) against the epsilon-entropy."""

    _invoke(
        "mc-smallball", config, seed, fmt, output, process=process, eps_grid=eps_grid,
        samples=samples, truncation=truncation,
    )


@mc_app.command("reproducing")
def mc_reproducing(
    process: str = ProcessOpt,
    eps_grid: str = typer.Option(..., help="eps values: start:stop:steps or a list"),
    samples: Optional[int] = typer.Option(None, help="Sample pairs"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    fmt: str = FormatOpt,
    output: Optional[Path] = OutputOpt,
) -> None:
    """E||X - Y||^2 under the reproducing distribution."""

    _invoke(
        "mc-reproducing", config, seed, fmt, output, process=process, eps_grid=eps_grid,
        samples=samples,
    )
