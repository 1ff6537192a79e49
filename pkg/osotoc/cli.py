"""Command-line interface for osotoc."""

import argparse
from pathlib import Path
from typing import List, Optional

import numpy as np
from rich.console import Console
from rich.progress import Progress
from rich.table import Table

from osotoc import __version__
from osotoc.bath import XiTable
from osotoc.bounds import (
    FIGURE2_GRID,
    bound_series,
    bound_validity_report,
    difference_bound_crossing,
    figure2_panels,
    render_validity_markdown,
)
from osotoc.config import RunConfig, load_config
from osotoc.engines import otoc_series
from osotoc.exceptions import CapabilityError, DimensionCapError, handle_error
from osotoc.hamiltonians import (
    build_chain_hamiltonian,
    joint_dimension,
    require_dephasing_chain,
)
from osotoc.influence import MAX_ENUMERATED_SITES
from osotoc.logging import setup_logging
from osotoc.quantum import DEFAULT_MAX_DIMENSION
from osotoc.types import ChainFamily, Engine, JsonDict, Scheme
from osotoc.utils import (
    atomic_write_text,
    bound_csv,
    format_float,
    otoc_csv,
    provenance_header,
    summary_line,
)

__all__ = ["build_parser", "main"]

USAGE_EXIT_CODE = 1


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the run, validate, figure2 and report subcommands."""
    parser = argparse.ArgumentParser(
        prog="osotoc",
        description="Open-system OTOCs of spin chains coupled to bosonic baths.",
    )
    parser.add_argument("--version", action="version", version=f"osotoc {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        help="Worker threads for grid evaluation (default: $OSOTOC_THREADS or 1)",
    )
    parser.add_argument(
        "--max-dim",
        type=int,
        default=DEFAULT_MAX_DIMENSION,
        help="Largest dense Hilbert-space dimension (default: %(default)s)",
    )
    parser.add_argument(
        "--log-file",
        type=Path,
        help="Write every log record to this file",
    )
    parser.add_argument(
        "--log-json",
        action="store_true",
        help="Write the log file as JSON lines",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Enable verbose logging",
    )

    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", help="Evaluate a configured series to CSV")
    run.add_argument("config", type=Path, help="TOML run configuration")
    run.add_argument("--output", type=Path, help="Override run.output")

    validate = commands.add_parser("validate", help="Check a configuration")
    validate.add_argument("config", type=Path, help="TOML run configuration")

    figure2 = commands.add_parser("figure2", help="Write the dephasing-bound panels")
    figure2.add_argument("--out-dir", type=Path, required=True)
    figure2.add_argument(
        "--points",
        type=int,
        default=FIGURE2_GRID[2],
        help=f"Grid points on [0, {FIGURE2_GRID[1]:g}] (default: {FIGURE2_GRID[2]})",
    )

    report = commands.add_parser("report", help="Write the bound-validity report")
    report.add_argument("--out-dir", type=Path, required=True)
    return parser


def run_command(
    config: RunConfig,
    output: Optional[Path],
    threads: Optional[int],
    max_dim: int,
    console: Console,
) -> int:
    """Evaluate the configured series and write its CSV."""
    times = config.grid.times()
    target = output or config.output
    summary: JsonDict = {
        "command": "run",
        "scheme": config.scheme.value,
        "engine": config.engine.value,
        "points": int(times.size),
        "output": str(target),
    }

    if config.engine is Engine.BOUND:
        params = config.bound_params()
        series = bound_series(params, times, threads)
        crossing = None
        if times[-1] > 0 and series.difference is not None:
            if series.difference[-1] >= 1.0:
                crossing = difference_bound_crossing(
                    params.coupling,
                    params.n_sites,
                    params.spectral,
                    params.ctx,
                    float(times[-1]),
                    XiTable(params.spectral, params.ctx, float(times[-1])),
                )
        header = provenance_header("run", config.raw, series.methods)
        if crossing is not None:
            header.append(f"# diff_bound reaches 1 at t={format_float(crossing)}")
        atomic_write_text(target, bound_csv(series, header))
        summary["d_methods"] = sorted(set(series.methods))
        summary["difference_crossing"] = crossing
    else:
        otoc = otoc_series(
            config.scheme,
            config.problem(max_dim),
            times,
            config.engine,
            threads,
            continuum=config.kernel == "continuum",
        )
        params = dict(config.raw)
        if "truncation" in otoc.metadata:
            params["truncation"] = otoc.metadata["truncation"]
        atomic_write_text(target, otoc_csv(otoc, provenance_header("run", params)))
        summary["truncation"] = otoc.metadata.get("truncation")

    console.out(summary_line(summary), highlight=False)
    return 0


def validate_command(config: RunConfig, max_dim: int, console: Console) -> int:
    """Schema and physics checks without evaluating anything."""
    table = Table(title="Configuration checks")
    table.add_column("Check", style="cyan")
    table.add_column("Result")

    chain_dim = config.chain.dimension
    if chain_dim > max_dim:
        raise DimensionCapError(chain_dim, max_dim)
    table.add_row("chain dimension", f"{chain_dim:,}")

    predicted = chain_dim
    if config.engine is Engine.INFLUENCE:
        hamiltonian = build_chain_hamiltonian(config.chain, max_dim)
        require_dephasing_chain(config.chain, hamiltonian)
        chain = config.chain
        if chain.n_sites > MAX_ENUMERATED_SITES and (
            chain.family is ChainFamily.CUSTOM_DIAGONAL or any(chain.bond_couplings)
        ):
            raise CapabilityError(
                f"influence engine needs zero couplings beyond "
                f"{MAX_ENUMERATED_SITES} sites"
            )
        table.add_row("commuting chain", "yes")
    elif config.scheme is not Scheme.CLOSED and config.engine is Engine.EXACT:
        assert config.bath is not None
        predicted = joint_dimension(config.chain.n_sites, config.bath)
        if predicted > max_dim:
            raise DimensionCapError(predicted, max_dim)
        refined = joint_dimension(
            config.chain.n_sites, config.bath.with_cutoff(2 * config.bath.n_max)
        )
        gate = "fits" if refined <= max_dim else "exceeds the cap"
        table.add_row("joint dimension", f"{predicted:,}")
        table.add_row("doubled cutoff", f"{refined:,} ({gate})")

    console.print(table)
    console.print(f"[green]OK[/green] predicted joint dimension {predicted:,}")
    return 0


def figure2_command(
    out_dir: Path, points: int, threads: Optional[int], console: Console
) -> int:
    """Write one CSV per dephasing-bound panel."""
    if points < 1:
        raise ValueError("points must be at least 1")
    times = np.linspace(FIGURE2_GRID[0], FIGURE2_GRID[1], points)
    panels = figure2_panels()
    written: List[str] = []
    with Progress(console=Console(stderr=True), transient=True) as progress:
        task = progress.add_task("Evaluating panels...", total=len(panels))
        for name, params in panels.items():
            series = bound_series(params, times, threads, with_difference=False)
            header = provenance_header(
                f"figure2 {name}", params.as_dict(), series.methods
            )
            path = out_dir / f"{name}.csv"
            atomic_write_text(path, bound_csv(series, header, include_difference=False))
            written.append(str(path))
            progress.advance(task)
    console.out(summary_line({"command": "figure2", "files": written}), highlight=False)
    return 0


def report_command(
    out_dir: Path, threads: Optional[int], max_dim: int, console: Console
) -> int:
    """Write the bound-validity comparison as CSV and Markdown."""
    report = bound_validity_report(workers=threads, max_dim=max_dim)
    lines = provenance_header("report", report.configs)
    lines.append(
        "config,scheme,engine,t,abs_F_OS,abs_F,factor,margin,worst_re_phi,exponent"
    )
    for row in report.rows:
        numbers = (
            row.t,
            row.abs_open,
            row.abs_closed,
            row.factor,
            row.margin,
            row.worst_re_phi,
            row.bound_exponent,
        )
        fields = [row.config, row.scheme, row.engine]
        fields.extend(format_float(x) for x in numbers)
        lines.append(",".join(fields))
    csv_path = out_dir / "bound_validity.csv"
    md_path = out_dir / "bound_validity.md"
    atomic_write_text(csv_path, "\n".join(lines) + "\n")
    atomic_write_text(md_path, render_validity_markdown(report))
    console.out(
        summary_line(
            {
                "command": "report",
                "files": [str(csv_path), str(md_path)],
                "rows": len(report.rows),
                "violations": len(report.violations),
            }
        ),
        highlight=False,
    )
    return 0


def main(argv: Optional[List[str]] = None, console: Optional[Console] = None) -> int:
    """Main entry point for the CLI."""
    console = console or Console()
    error_console = Console(stderr=True)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # usage errors share the configuration exit code
        return 0 if e.code in (0, None) else USAGE_EXIT_CODE
    try:
        setup_logging(args.log_file, args.verbose, args.log_json)
        if args.threads is not None and args.threads < 1:
            raise ValueError("--threads must be at least 1")

        if args.command == "run":
            config = load_config(args.config)
            return run_command(config, args.output, args.threads, args.max_dim, console)
        if args.command == "validate":
            return validate_command(load_config(args.config), args.max_dim, console)
        if args.command == "figure2":
            return figure2_command(args.out_dir, args.points, args.threads, console)
        return report_command(args.out_dir, args.threads, args.max_dim, console)
    except Exception as e:
        return handle_error(error_console, e)
