"""
Train command - Run every agent kind over every seed (and sweep value).
"""

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from cli.command import command


@command(name="train", help="Train the configured agents and write per-episode metrics.")
def train_command(
    ctx: typer.Context,
    config: Annotated[Path, typer.Argument(help="Experiment YAML file")],
) -> int:
    app = ctx.obj
    spec = app.load(config)
    run_dir = app.run_directory(spec)
    outcome = app.service("TrainingService").run_training(spec, run_dir, str(config))

    table = Table(title=f"{spec.scenario}: {len(outcome.records)} episodes")
    table.add_column("agent")
    if spec.sweep is not None:
        table.add_column(spec.sweep.parameter, justify="right")
    table.add_column("seeds", justify="right")
    table.add_column("mean reward", justify="right")
    table.add_column("final reward", justify="right")
    table.add_column("energy / episode [J]", justify="right")
    for row in outcome.summary:
        energy = row.mean_energy_sampling + row.mean_energy_computation + row.mean_energy_transmission
        cells = [row.agent]
        if spec.sweep is not None:
            cells.append(f"{row.axis_value:g}")
        cells += [str(row.seeds), f"{row.mean_reward:.4g}", f"{row.final_reward:.4g}", f"{energy:.4g}"]
        table.add_row(*cells)
    app.console.print(table)
    app.console.print(f"Wrote {run_dir.episodes_csv} and {run_dir.summary_csv}")
    return 0
