"""CLI entry point for cpnsurf."""

from __future__ import annotations

import json
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import numpy as np

from .emit import MeshEmitter
from .errors import EXIT_CHECK_FAILED, EXIT_CONFIG, ConfigError, CpnError
from .frames import frame_report
from .geometry import CURVATURE_HEADER, curvature_table, topological_charge, total_action, willmore
from .immersion import export_mesh
from .jobs import JobConfig, parse_point
from .logging_config import (
    configure_logging,
    get_logger,
    log_operation,
    log_operation_complete,
)
from .model import (
    VALIDATION_POINTS,
    conservation_residual,
    default_base_point,
    el_residual,
    sample_safe_points,
)
from .presets import PresetManager
from .settings import DEFAULT_TOLERANCES, Settings
from .su3 import decompose_su3, recompose_su3
from .utils import dump_json, format_float, format_number
from .verify import REPORT_HEADER, run_verification

logger = get_logger(__name__)

MESH_FORMATS = ("obj", "ply", "csv")


@contextmanager
def _operation(name: str, **context: Any) -> Iterator[dict[str, Any]]:
    """Log a command and map cpnsurf errors to their exit codes."""
    op = log_operation(logger, name, **context)
    try:
        yield op
    except CpnError as e:
        log_operation_complete(
            logger, op, success=False, error=e.message, error_type=type(e).__name__
        )
        click.echo(f"Error: {e.message}", err=True)
        for key, value in e.to_dict()["context"].items():
            click.echo(f"  {key}: {value}", err=True)
        raise click.exceptions.Exit(e.exit_code) from e
    except Exception as e:
        log_operation_complete(
            logger, op, success=False, error=str(e), error_type=type(e).__name__
        )
        raise
    log_operation_complete(logger, op, success=True)


def _parse_params(raw: tuple[str, ...]) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for item in raw:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError("Parameters are written NAME=VALUE", param=item)
        try:
            params[name.strip()] = float(value)
        except ValueError:
            params[name.strip()] = value.strip()
    return params


def _load_job(ctx: click.Context, options: dict[str, Any]) -> JobConfig:
    """Resolve --config/--preset plus the override flags into a job.

    Raises:
        ConfigError: If neither --config nor --preset is given
    """
    manager: PresetManager = ctx.obj["presets"]
    config, preset = options.get("config"), options.get("preset")
    if config and preset:
        raise ConfigError("Give either --config or --preset, not both")
    if config:
        job = JobConfig.load(Path(config), manager)
    elif preset:
        job = JobConfig.from_dict(
            {"preset": preset, "params": _parse_params(options.get("param", ()))}, manager
        )
    else:
        raise ConfigError("A job needs --config or --preset")
    return job.with_overrides(
        tol=options.get("tol"),
        grid_n=options.get("grid"),
        chart=options.get("chart"),
        out=options.get("out"),
    )


def job_options(grid: bool = False) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """Shared job-selection flags; ``grid`` adds --grid and --chart."""

    def decorate(fn: Callable[..., Any]) -> Callable[..., Any]:
        if grid:
            fn = click.option(
                "--chart",
                type=click.Choice(["disk", "polar", "both"]),
                default=None,
                help="Parameter chart for the grid",
            )(fn)
            fn = click.option("--grid", type=click.IntRange(min=2), default=None, help="Grid resolution")(fn)
        fn = click.option("--tol", type=float, default=None, help="Quadrature tolerance")(fn)
        fn = click.option(
            "--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory"
        )(fn)
        fn = click.option(
            "--param", multiple=True, help="Preset parameter NAME=VALUE (repeatable)"
        )(fn)
        fn = click.option("--preset", default=None, help="Built-in preset name (see 'presets')")(fn)
        fn = click.option(
            "--config", type=click.Path(dir_okay=False), default=None, help="Job file (JSON or YAML)"
        )(fn)
        return fn

    return decorate


@click.group(invoke_without_command=True)
@click.option(
    "--log-level",
    default="WARNING",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Set logging level",
)
@click.option(
    "--json-logs/--human-logs",
    default=None,
    help="Output logs in JSON format (auto-detected by default)",
)
@click.pass_context
def cli(ctx: click.Context, log_level: str, json_logs: bool | None) -> None:
    """Weierstrass immersions and geometry of CP^N sigma-model solutions."""
    # Configure logging early
    configure_logging(level=log_level, json_output=json_logs)

    try:
        settings = Settings.from_env()
    except ConfigError as e:
        click.echo(f"Error: {e.message}", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from e
    ctx.obj = {"settings": settings, "presets": PresetManager(settings.preset_dir)}

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command()
@job_options()
@click.pass_context
def construct(ctx: click.Context, **options: Any) -> None:
    """Build a solution and report its degrees, singularities and residuals."""
    with _operation("construct", preset=options.get("preset"), config=options.get("config")):
        job = _load_job(ctx, options)
        sol = job.solution
        summary = sol.to_dict()
        if not sol.is_constant:
            points = sample_safe_points(sol, VALIDATION_POINTS)
            el = [el_residual(sol, p) for p in points]
            summary["residuals"] = {
                "points": len(points),
                "el_max": max(el),
                "el_mean": float(np.mean(el)),
                "conservation_max": max(conservation_residual(sol, p) for p in points),
            }
        path = MeshEmitter(job.output_dir).write_json(f"{job.name}-solution", summary)

    click.echo(f"Solution: {sol.name} (N = {sol.n}, {sol.kind.value})")
    for i, comp in enumerate(summary["f"]):
        click.echo(f"  f{i} = {comp}")
    click.echo(f"Singular points: {len(summary['singular_points'])}")
    click.echo(f"Singular curves: {len(summary['singular_curves'])}")
    click.echo(f"Euler-Lagrange check: {'pass' if sol.is_solution else 'FAIL'}")
    if "residuals" in summary:
        click.echo(f"  max residual: {summary['residuals']['el_max']:.3e}")
    click.echo(f"Summary written to {path}")


@cli.command()
@job_options(grid=True)
@click.option(
    "--project",
    type=click.Choice(["first3", "pca"]),
    default="first3",
    help="Projection of su(N+1) coordinates for OBJ/PLY",
)
@click.pass_context
def immerse(ctx: click.Context, project: str, **options: Any) -> None:
    """Integrate the immersion on a grid and write OBJ, PLY and CSV meshes."""
    settings: Settings = ctx.obj["settings"]
    with _operation("immerse", preset=options.get("preset"), project=project):
        job = _load_job(ctx, options)
        grid = job.parameter_grid()
        emitter = MeshEmitter(job.output_dir)
        formats = tuple(job.options.get("formats", MESH_FORMATS))
        summary = export_mesh(
            job.immersion(),
            grid,
            emitter,
            project=project,
            formats=formats,
            name=job.name,
            threads=settings.threads,
        )
        emitter.write_json(
            f"{job.name}-mesh", {"grid": grid.to_dict(), "job": job.to_dict(), **summary.to_dict()}
        )
        stats = emitter.finalize_stats()

    click.echo(f"Vertices: {format_number(summary.vertices)}")
    click.echo(f"Faces: {format_number(summary.faces)}")
    click.echo(f"Files written: {stats['summary']['files']} (unchanged: {stats['summary']['skipped']})")
    for f in summary.files:
        click.echo(f"  {f}")


@cli.command()
@job_options(grid=True)
@click.pass_context
def curvature(ctx: click.Context, **options: Any) -> None:
    """Write the metric and curvature table on the job grid."""
    settings: Settings = ctx.obj["settings"]
    with _operation("curvature", preset=options.get("preset")):
        job = _load_job(ctx, options)
        rows = curvature_table(
            job.solution, job.parameter_grid(), job.tolerances, threads=settings.threads
        )
        path = MeshEmitter(job.output_dir).write_table(f"{job.name}-curvature", CURVATURE_HEADER, rows)

    K = np.array([r[6] for r in rows], dtype=np.float64)
    finite = K[np.isfinite(K)]
    click.echo(f"Rows: {format_number(len(rows))} (degenerate: {len(K) - len(finite)})")
    if finite.size:
        click.echo(f"K range: [{finite.min():.10g}, {finite.max():.10g}]")
    click.echo(f"Table written to {path}")


@cli.command()
@job_options()
@click.pass_context
def charge(ctx: click.Context, **options: Any) -> None:
    """Topological charge and action over the sphere."""
    with _operation("charge", preset=options.get("preset")) as op:
        job = _load_job(ctx, options)
        Q = topological_charge(job.solution, job.tolerances)
        S = total_action(job.solution, job.tolerances)
        gap = abs(Q.value - round(Q.value))
        result = {"charge": Q.to_dict(), "action": S.to_dict(), "integrality_gap": gap}
        MeshEmitter(job.output_dir).write_json(f"{job.name}-charge", result)
        op["charge"] = Q.value

    click.echo(f"Q = {format_float(Q.value)}")
    click.echo(f"Integrality gap: {gap:.3e}")
    click.echo(f"S = {format_float(S.value)} (2 pi |Q| = {format_float(2 * np.pi * abs(Q.value))})")


@cli.command(name="willmore")
@job_options()
@click.option(
    "--region",
    type=(float, float),
    default=None,
    help="Annulus R_MIN R_MAX instead of the whole sphere",
)
@click.pass_context
def willmore_cmd(ctx: click.Context, region: tuple[float, float] | None, **options: Any) -> None:
    """Willmore functional with its error estimate."""
    settings: Settings = ctx.obj["settings"]
    with _operation("willmore", preset=options.get("preset"), region=region):
        job = _load_job(ctx, options)
        if region is None and job.options.get("region") is not None:
            region = tuple(job.options["region"])
        result = willmore(job.solution, region, job.tolerances, settings.threads)
        MeshEmitter(job.output_dir).write_json(
            f"{job.name}-willmore", {"region": region, **result.to_dict()}
        )

    click.echo(f"Willmore functional: {format_float(result.value)}")
    click.echo(f"Error estimate: {result.error:.3e} ({result.levels} refinements)")


@cli.command()
@job_options()
@click.option("--point", type=(float, float), default=None, help="Point RE IM (default: base point)")
@click.pass_context
def frame(ctx: click.Context, point: tuple[float, float] | None, **options: Any) -> None:
    """Moving frame, Gauss-Weingarten matrices and GCR residual at a point."""
    with _operation("frame", preset=options.get("preset"), point=point):
        job = _load_job(ctx, options)
        if point is not None:
            pt = complex(*point)
        elif job.base_point is not None:
            pt = job.base_point
        else:
            pt = default_base_point(job.solution)
        report = frame_report(job.solution, pt, job.tolerances)
        path = MeshEmitter(job.output_dir).write_json(f"{job.name}-frame", report)

    click.echo(f"Frame at {pt}: {report['frame']['residual']:.3e} orthonormality residual")
    click.echo(f"GW defining residual: {report['gw_defining_residual']:.3e}")
    click.echo(f"GCR residual: {report['gcr_residual']:.3e}")
    if "Phi" in report:
        click.echo(f"Phi unitarity: {report['Phi_unitarity']:.3e}")
    click.echo(f"Report written to {path}")


def _read_matrix(path: Path) -> np.ndarray:
    """3×3 matrix from JSON: rows of numbers or [re, im] pairs, optionally under "matrix".

    Raises:
        ConfigError: If the file is unreadable or not a 3×3 matrix
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("Cannot read matrix file", path=str(path), error=str(e)) from e
    if isinstance(data, dict):
        data = data.get("matrix")
    if not isinstance(data, list) or len(data) != 3 or any(
        not isinstance(row, list) or len(row) != 3 for row in data
    ):
        raise ConfigError("Matrix file must hold a 3x3 matrix", path=str(path))
    return np.array([[parse_point(v) for v in row] for row in data], dtype=np.complex128)


@cli.command(name="decompose-su3")
@click.argument("matrix_file", type=click.Path(dir_okay=False))
@click.option(
    "--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory"
)
def decompose_su3_cmd(matrix_file: str, out: Path | None) -> None:
    """Factor an SU(3) matrix as diag(1, A1) M diag(1, A2)."""
    with _operation("decompose_su3", matrix_file=matrix_file):
        g = _read_matrix(Path(matrix_file))
        factors = decompose_su3(g)
        result = {
            **factors.to_dict(),
            "recomposition_error": float(np.max(np.abs(recompose_su3(factors) - g))),
        }
        if out is not None:
            MeshEmitter(out).write_json(f"{Path(matrix_file).stem}-su3", result)

    click.echo(dump_json(result), nl=False)


@cli.command()
@click.option("--preset", "presets", multiple=True, help="Restrict to checks touching a preset")
@click.option("--group", "groups", multiple=True, help="Run only these groups")
@click.option("--tol", type=float, default=None, help="Quadrature tolerance")
@click.option(
    "--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory"
)
@click.pass_context
def verify(
    ctx: click.Context,
    presets: tuple[str, ...],
    groups: tuple[str, ...],
    tol: float | None,
    out: Path | None,
) -> None:
    """Run the acceptance suite and print the verification report."""
    settings: Settings = ctx.obj["settings"]
    manager: PresetManager = ctx.obj["presets"]
    with _operation("verify", presets=list(presets), groups=list(groups)) as op:
        for name in presets:
            manager.require_preset(name)
        tolerances = DEFAULT_TOLERANCES
        if tol is not None:
            tolerances = tolerances.with_overrides({"path_quadrature": tol, "sphere_quadrature": tol})
        report = run_verification(manager, tolerances, settings.threads, groups or None, presets or None)
        if out is not None:
            emitter = MeshEmitter(out)
            emitter.write_table("verification", REPORT_HEADER, report.table())
            emitter.write_json("verification", report.to_dict())
        op["failures"] = len(report.failures)

    for row in report.rows:
        if row.kind == "ledger":
            status, bound = "NOTE", ""
        else:
            status = "PASS" if row.passed else "FAIL"
            bound = f" (tol {row.tolerance:.0e})"
        click.echo(f"[{status}] {row.name}: {row.value:.6g}{bound}  ({row.reference})")
    click.echo(
        f"\n{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed, "
        f"{len(report.ledger_rows)} ledger notes"
    )
    if not report.passed:
        raise click.exceptions.Exit(EXIT_CHECK_FAILED)


@cli.command(name="presets")
@click.option("--show", default=None, help="Print one preset as JSON")
@click.pass_context
def presets_cmd(ctx: click.Context, show: str | None) -> None:
    """List built-in presets."""
    manager: PresetManager = ctx.obj["presets"]
    if show:
        with _operation("show_preset", preset=show):
            preset = manager.require_preset(show)
        click.echo(json.dumps(preset.to_dict(), indent=2, sort_keys=True))
        return

    names = manager.list_presets()
    if not names:
        click.echo(f"No presets found in {manager.config_dir}")
        return
    for name in names:
        preset = manager.load_preset(name)
        title = preset.title if preset else "(unreadable)"
        click.echo(f"{name:16s} {title}")


def main() -> None:
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
