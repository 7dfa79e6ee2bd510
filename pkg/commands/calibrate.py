"""
Calibrate command - Fit the information-usage constants to target iteration counts.
"""

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from cli.command import command


@command(name="calibrate", help="Fit (c0, c1) so the bound matches (k, I_glob) targets.")
def calibrate_command(
    ctx: typer.Context,
    config: Annotated[Path, typer.Argument(help="Experiment YAML file")],
    targets: Annotated[Path, typer.Option("--targets", help="CSV with columns k,global_iterations")],
) -> int:
    app = ctx.obj
    spec = app.load(config)
    run_dir = app.run_directory(spec)
    result = app.service("CalibrationService").calibrate(spec, targets, run_dir)

    table = Table(title=f"c0 = {result.c0:.6g}, c1 = {result.c1:.6g}")
    table.add_column("k", justify="right")
    table.add_column("target", justify="right")
    table.add_column("fitted", justify="right")
    for (k, target), fitted in zip(result.targets, result.fitted):
        table.add_row(f"{k:g}", f"{target:g}", f"{fitted:.3f}")
    app.console.print(table)
    app.console.print(f"Wrote {run_dir.calibration}")
    return 0
