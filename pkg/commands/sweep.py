"""
Sweep command - Tabulate global-iteration bounds over k and one axis.
"""

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from cli.command import command


@command(name="sweep", help="Run an analytic bound sweep (axis tau, L, varrho or U).")
def sweep_command(
    ctx: typer.Context,
    config: Annotated[Path, typer.Argument(help="Experiment YAML file with a sweep section")],
) -> int:
    app = ctx.obj
    spec = app.load(config)
    run_dir = app.run_directory(spec)
    rows = app.service("SweepService").run_bound_sweep(spec, run_dir, str(config))

    table = Table(title=f"I_glob over k, {spec.sweep.parameter} sweep")
    table.add_column(spec.sweep.parameter, justify="right")
    table.add_column("k=k_min", justify="right")
    table.add_column("k=k_max", justify="right")
    table.add_column("divergent", justify="right")
    for value in spec.sweep.values:
        cells = [row for row in rows if row.axis_value == float(value)]
        first, last = cells[0], cells[-1]
        table.add_row(
            f"{value:g}",
            "-" if first.divergent else str(first.global_iterations),
            "-" if last.divergent else str(last.global_iterations),
            str(sum(row.divergent for row in cells)),
        )
    app.console.print(table)
    app.console.print(f"Wrote {run_dir.sweep_csv(spec.sweep.parameter)}")
    return 0
