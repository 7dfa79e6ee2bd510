"""
Plot-data command - Emit plot-ready series from a run directory.
"""

from pathlib import Path
from typing import Annotated

import typer

from cli.command import command
from repositories import RunDirectory


@command(name="plot-data", help="Write plot series (reward_curve, energy_vs_pmax, iteration_sweep, convergence_curve).")
def plot_data_command(
    ctx: typer.Context,
    directory: Annotated[Path, typer.Argument(help="Run directory written by sweep or train")],
    kind: Annotated[str, typer.Option("--kind", help="Plot kind")],
    config: Annotated[Path | None, typer.Option("--config", help="Experiment file (convergence_curve)")] = None,
) -> int:
    app = ctx.obj
    spec = app.load(config) if config is not None else None
    written = app.service("PlotDataService").emit_plot_data(RunDirectory(directory), kind, spec)
    for path in written:
        app.console.print(f"Wrote {path}")
    return 0
