"""Main CLI entry point for roughmetrics."""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import typer
import yaml
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.table import Table

from .. import __version__
from ..constructions.registry import build_space
from ..constructions.trees import check_decreasing, tree_points
from ..core.config import Settings, get_settings, use_config_file
from ..core.errors import (
    BudgetExhaustedError,
    DomainError,
    MetricViolationError,
    PreconditionError,
    RoughMetricsError,
    SpaceFormatError,
)
from ..core.models import (
    AnalysisReport,
    ConstructionFamily,
    ConstructionSpec,
    OrderCheckReport,
    WitnessOutcome,
)
from ..embeddings.distortion import save_coords_csv
from ..embeddings.schoenberg import schoenberg_embed
from ..embeddings.trees import minimal_modulus, sequence_condition_check, tree_embed_f
from ..metric.analysis import (
    comparison_angles,
    doubling_probe,
    lp_exponent_lower_bound,
    max_lp_exponent,
)
from ..metric.analysis import validate as validate_space
from ..metric.io import document_from_space, load_ordered_set, load_space, save_space
from ..ordered.ordered_set import elementary_combination_check
from ..search.engine import exhaustive_max_sra_subset, max_sra_subset, sra_growth_profile
from ..sra.analysis import (
    is_ultrametric,
    save_triple_table_csv,
    sra_check,
    sra_required_alpha,
    sra_triple_table,
    triple_table_csv,
    unc_check,
)
from ..utils.logging import setup_logging
from ..witness.constants import constants as constants_bundle
from ..witness.iteration import (
    lemma_step_check,
    pt_iteration,
    save_trace_jsonl,
    termination_bound_check,
)
from ..witness.pipeline import extract_sra_subset

app = typer.Typer(
    name="roughmetrics",
    help="Rough self-contracting curves and SRA metric spaces",
    add_completion=False,
)
probe_app = typer.Typer(help="Finite probes of infinite families")
config_app = typer.Typer(help="Configuration management")
app.add_typer(probe_app, name="probe")
app.add_typer(config_app, name="config")

console = Console()
err_console = Console(stderr=True, style="red")

# Shared options
tolerance_option = typer.Option(None, "--tolerance", help="Numeric tolerance override")
out_option = typer.Option(None, "--out", "-o", help="Write the JSON report to this file")
pretty_option = typer.Option(False, "--pretty", help="Render the report as a table")
budget_option = typer.Option(None, "--budget", help="Search node budget")
config_option = typer.Option(None, "--config", help="Path to config file")


class EmbedMethod(str, Enum):
    """Embedding constructions exposed by the CLI."""

    SCHOENBERG = "schoenberg"
    TREE = "tree"


class OutputFormat(str, Enum):
    """Report formats of the analyze command."""

    JSON = "json"
    CSV = "csv"


@contextmanager
def _reported_errors() -> Iterator[None]:
    """Map library errors to exit codes."""
    try:
        yield
    except PreconditionError as e:
        err_console.print(f"Error: {e}")
        if e.report:
            err_console.print(json.dumps(e.report, indent=2, default=str), markup=False)
        raise typer.Exit(e.exit_code)
    except MetricViolationError as e:
        err_console.print(f"Error: {e}")
        if e.report is not None:
            err_console.print(e.report.format_report(), markup=False)
        raise typer.Exit(e.exit_code)
    except RoughMetricsError as e:
        err_console.print(f"Error: {e}")
        raise typer.Exit(e.exit_code)
    except FileNotFoundError as e:
        err_console.print(f"Error: {e}")
        raise typer.Exit(2)


def _emit(report: BaseModel, out: Optional[Path] = None, pretty: bool = False) -> None:
    text = report.model_dump_json(indent=2)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        console.print(f"[green]✓[/green] Report written to {out}")
        return

    if pretty:
        table = Table(title=type(report).__name__)
        table.add_column("Field", style="cyan")
        table.add_column("Value", style="green")
        for key, value in report.model_dump(mode="json").items():
            if value is None:
                continue
            table.add_row(key, value if isinstance(value, str) else json.dumps(value))
        console.print(table)
        return

    console.print(text, soft_wrap=True, highlight=False, markup=False)


def _number_list(raw: str, cast: type = float) -> list[Any]:
    try:
        return [cast(part) for part in raw.replace(" ", "").split(",") if part]
    except ValueError as e:
        raise SpaceFormatError(f"Expected a comma-separated list, got {raw!r}") from e


def _parse_params(items: Optional[list[str]]) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise SpaceFormatError(f"Expected key=value, got {item!r}", "params")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


@app.command()
def validate(
    space_path: Path = typer.Argument(..., help="Space file"),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Check the metric axioms of a space file."""
    with _reported_errors():
        try:
            space = load_space(space_path, tolerance)
        except MetricViolationError as e:
            _emit(e.report, out, pretty)
            err_console.print(f"Error: {e}")
            raise typer.Exit(e.exit_code)
        _emit(validate_space(space, tolerance), out, pretty)


@app.command()
def analyze(
    space_path: Path = typer.Argument(..., help="Space file"),
    alpha_required: bool = typer.Option(
        True, "--alpha-required/--no-alpha-required", help="Compute the least SRA parameter"
    ),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Check SRA(alpha)"),
    lp: bool = typer.Option(True, "--lp/--no-lp", help="Largest metric power exponent"),
    lp_lower: bool = typer.Option(False, "--lp-lower", help="Constructive exponent from SRA"),
    unc: Optional[float] = typer.Option(None, "--unc", help="Check UNC(delta)"),
    angles: Optional[str] = typer.Option(None, "--angles", help="Comparison angles of i,j,k"),
    table: Optional[Path] = typer.Option(None, "--table", help="Per-triple CSV table"),
    fmt: OutputFormat = typer.Option(
        OutputFormat.JSON, "--format", help="json report, or csv per-triple table"
    ),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Analyze the SRA and power-metric structure of a space."""
    with _reported_errors():
        space = load_space(space_path, tolerance)
        if fmt == OutputFormat.CSV:
            rows = sra_triple_table(space)
            if out is not None:
                save_triple_table_csv(rows, out)
                console.print(f"[green]✓[/green] Table written to {out}")
            else:
                console.print(
                    triple_table_csv(rows), end="", soft_wrap=True, highlight=False, markup=False
                )
            return
        report = AnalysisReport(
            name=space.name,
            n=space.n,
            diameter=space.diameter(),
            ultrametric=is_ultrametric(space, tolerance),
        )
        if alpha_required:
            report.sra = sra_required_alpha(space)
        if alpha is not None:
            report.check = sra_check(space, alpha, tolerance)
        if lp:
            report.max_lp_exponent = max_lp_exponent(space)
        if lp_lower:
            report.lp_lower_bound = lp_exponent_lower_bound(space)
        if unc is not None:
            report.unc = unc_check(space, unc)
        if angles:
            report.angles = comparison_angles(space, _number_list(angles, int))
        if table is not None:
            save_triple_table_csv(sra_triple_table(space), table)
        _emit(report, out, pretty)


@app.command("order-check")
def order_check(
    ordered_path: Path = typer.Argument(..., help="Ordered-set or space file"),
    lam: Optional[float] = typer.Option(None, "--lam", help="Combine kernels at lambda"),
    theta: Optional[float] = typer.Option(None, "--theta", help="Run the iteration at theta"),
    m: Optional[int] = typer.Option(None, "--m", help="Iteration window m"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Write the trace as JSON lines"),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Self-contracting kernels of an ordered set, optionally with the iteration trace."""
    with _reported_errors():
        s = load_ordered_set(ordered_path, tolerance)
        report = OrderCheckReport(order=s.report())
        if lam is not None:
            report.elementary = elementary_combination_check(s, lam, tolerance)
        if theta is not None:
            if m is None:
                raise DomainError("--theta needs --m")
            witness = pt_iteration(s, theta, m, tolerance)
            report.trace = witness
            if lam is not None:
                report.lemma = lemma_step_check(witness, s, lam, tolerance)
            if witness.outcome == WitnessOutcome.TERMINATED:
                report.termination = termination_bound_check(s, theta, m)
            if trace is not None:
                save_trace_jsonl(witness, trace)
        _emit(report, out, pretty)


@app.command()
def construct(
    family: ConstructionFamily = typer.Argument(..., help="Construction family"),
    param: Optional[list[str]] = typer.Option(
        None, "--param", "-p", help="key=value, values parsed as JSON"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    inline: bool = typer.Option(False, "--inline", help="Store points instead of the recipe"),
    out: Optional[Path] = out_option,
) -> None:
    """Build an example space."""
    with _reported_errors():
        space = build_space(ConstructionSpec(family=family, params=_parse_params(param), seed=seed))
        if inline:
            space.construction = None
        if out is not None:
            save_space(space, out)
            console.print(f"[green]✓[/green] Wrote {space.n}-point space to {out}")
            return
        doc = document_from_space(space)
        console.print(
            doc.model_dump_json(indent=2, exclude_none=True),
            soft_wrap=True,
            highlight=False,
            markup=False,
        )


@app.command()
def search(
    space_path: Path = typer.Argument(..., help="Space file"),
    alpha: float = typer.Option(..., "--alpha", help="SRA parameter"),
    budget: Optional[int] = budget_option,
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads"),
    exhaustive: bool = typer.Option(False, "--exhaustive", help="Enumerate all subsets"),
    require_proof: bool = typer.Option(
        False, "--require-proof", help="Fail when optimality is not proved"
    ),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Largest SRA(alpha) subset of a space."""
    with _reported_errors():
        space = load_space(space_path, tolerance)
        if exhaustive:
            result = exhaustive_max_sra_subset(space, alpha)
        else:
            result = max_sra_subset(space, alpha, budget=budget, threads=threads)
        _emit(result, out, pretty)
        if require_proof and not result.proved_optimal:
            raise BudgetExhaustedError(
                f"Budget exhausted after {result.nodes_explored} nodes; "
                f"best size {result.cardinality} is not proved optimal"
            )


@app.command()
def extract(
    ordered_path: Path = typer.Argument(..., help="Ordered-set or space file"),
    alpha: float = typer.Option(..., "--alpha", help="SRA parameter in (1/2, 1)"),
    k: int = typer.Option(..., "--k", help="Subset size"),
    budget: Optional[int] = budget_option,
    ramsey_c: Optional[float] = typer.Option(None, "--ramsey-c", help="Ramsey constant"),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Extract a K-point SRA(alpha) subset from a rough self-contracting set."""
    with _reported_errors():
        s = load_ordered_set(ordered_path, tolerance)
        _emit(extract_sra_subset(s, alpha, k, budget=budget, ramsey_c=ramsey_c), out, pretty)


@app.command()
def embed(
    space_path: Optional[Path] = typer.Argument(None, help="Space file (schoenberg)"),
    method: EmbedMethod = typer.Option(EmbedMethod.SCHOENBERG, "--method", help="Construction"),
    base_index: int = typer.Option(0, "--base-index", help="Point placed at the origin"),
    t: Optional[str] = typer.Option(None, "--t", help="Tree heights t1,t2,... (tree)"),
    modulus: Optional[int] = typer.Option(None, "--modulus", help="Residue modulus M (tree)"),
    samples: int = typer.Option(1, "--samples", help="Sample points per tree segment"),
    coords_csv: Optional[Path] = typer.Option(None, "--coords-csv", help="Write coordinates"),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Embed a space into Euclidean space, or a comb tree into l1."""
    with _reported_errors():
        if method == EmbedMethod.SCHOENBERG:
            if space_path is None:
                raise DomainError("The schoenberg method needs a space file")
            result = schoenberg_embed(load_space(space_path, tolerance), base_index)
        else:
            if t is None:
                raise DomainError("The tree method needs --t")
            heights = check_decreasing(_number_list(t))
            big_m = modulus if modulus is not None else minimal_modulus(heights)
            result = tree_embed_f(heights, big_m, tree_points(heights, samples))
        if coords_csv is not None and result.success:
            save_coords_csv(result, coords_csv)
        _emit(result, out, pretty)


@app.command("constants")
def constants_command(
    theta: float = typer.Option(..., "--theta", help="Medial parameter in (0, 1)"),
    m: int = typer.Option(..., "--m", help="Iteration window"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Target SRA parameter"),
    k: Optional[int] = typer.Option(None, "--k", help="Target subset size"),
    ramsey_c: Optional[float] = typer.Option(None, "--ramsey-c", help="Ramsey constant"),
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Print the constants of the extraction pipeline."""
    with _reported_errors():
        _emit(constants_bundle(theta, m, alpha, k, ramsey_c), out, pretty)


@probe_app.command("doubling")
def probe_doubling(
    space_path: Path = typer.Argument(..., help="Space file"),
    radius: Optional[list[float]] = typer.Option(
        None, "--radius", "-r", help="Ball radius (repeatable; dyadic grid when omitted)"
    ),
    tolerance: Optional[float] = tolerance_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Lower bound for the doubling constant of a space."""
    with _reported_errors():
        space = load_space(space_path, tolerance)
        grid = list(radius) if radius else [space.diameter() / 2.0**i for i in range(6)]
        _emit(doubling_probe(space, grid, tolerance), out, pretty)


@probe_app.command("growth")
def probe_growth(
    family: ConstructionFamily = typer.Argument(..., help="Construction family"),
    size_param: str = typer.Option(..., "--size-param", help="Parameter carrying the size"),
    sizes: str = typer.Option(..., "--sizes", help="Comma-separated sizes"),
    alpha: float = typer.Option(..., "--alpha", help="SRA parameter"),
    param: Optional[list[str]] = typer.Option(None, "--param", "-p", help="Fixed key=value"),
    budget: Optional[int] = budget_option,
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Largest SRA(alpha) subsets along a growing family."""
    with _reported_errors():
        spec = ConstructionSpec(family=family, params=_parse_params(param))
        profile = sra_growth_profile(
            (spec, size_param), alpha, _number_list(sizes, int), budget=budget
        )
        _emit(profile, out, pretty)


@probe_app.command("sequence")
def probe_sequence(
    t: str = typer.Option(..., "--t", help="Heights t1,t2,..."),
    delta: float = typer.Option(..., "--delta", help="Decay delta in (0, 1)"),
    m: int = typer.Option(..., "--m", help="Decay step m"),
    out: Optional[Path] = out_option,
    pretty: bool = pretty_option,
) -> None:
    """Decay and halving-lag conditions on a sequence prefix."""
    with _reported_errors():
        _emit(sequence_condition_check(_number_list(t), delta, m), out, pretty)


@config_app.command("show")
def config_show(config_path: Optional[Path] = config_option) -> None:
    """Show current configuration."""
    try:
        settings = Settings.load_from_file(config_path) if config_path else get_settings()
    except FileNotFoundError as e:
        err_console.print(f"Error: {e}")
        raise typer.Exit(2)
    console.print(settings.model_dump_json(indent=2), soft_wrap=True, highlight=False)


@config_app.command("init")
def config_init(
    path: Path = typer.Argument(Path("roughmetrics.yaml"), help="Config file to create"),
    force: bool = typer.Option(False, "--force", help="Overwrite an existing file"),
) -> None:
    """Write the default configuration to a YAML file."""
    if path.exists() and not force:
        if not typer.confirm(f"{path} already exists. Overwrite?"):
            raise typer.Exit(0)
    Settings().save_to_file(path)
    console.print(f"[green]✓[/green] Config saved to: {path}")


@config_app.command("validate")
def config_validate(path: Path = typer.Argument(..., help="Config file")) -> None:
    """Validate a configuration file."""
    try:
        Settings.load_from_file(path)
    except FileNotFoundError as e:
        err_console.print(f"✗ {e}")
        raise typer.Exit(2)
    except ValidationError as e:
        err_console.print(f"✗ Configuration is invalid:\n{e}")
        raise typer.Exit(1)
    except Exception as e:
        err_console.print(f"✗ Could not read configuration: {e}")
        raise typer.Exit(1)
    console.print("[green]✓[/green] Configuration is valid")


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        console.print(f"roughmetrics v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None, "--version", callback=version_callback, is_eager=True, help="Show version and exit"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose output"),
    log_dir: Optional[Path] = typer.Option(None, "--log-dir", help="Also log to files here"),
    config_path: Optional[Path] = typer.Option(
        None, "--config", envvar="ROUGHMETRICS_CONFIG", help="YAML settings for this run"
    ),
) -> None:
    """Rough self-contracting curves and SRA metric spaces."""
    try:
        use_config_file(config_path)
        settings = get_settings()
    except FileNotFoundError as e:
        err_console.print(f"Error: {e}")
        raise typer.Exit(2)
    except (ValidationError, yaml.YAMLError) as e:
        err_console.print(f"Error: configuration is invalid:\n{e}")
        raise typer.Exit(1)
    verbose = verbose or settings.verbose
    if verbose or log_dir is not None:
        setup_logging(log_dir=log_dir, verbose=verbose, command=ctx.invoked_subcommand)


if __name__ == "__main__":
    app()
