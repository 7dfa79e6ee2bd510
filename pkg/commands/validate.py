"""
Validate command - Check an experiment file without running it.
"""

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from cli.command import command
from convergence import global_iterations


@command(name="validate", help="Validate an experiment file and show its key figures.")
def validate_command(
    ctx: typer.Context,
    config: Annotated[Path, typer.Argument(help="Experiment YAML file")],
) -> int:
    app = ctx.obj
    spec = app.load(config)
    net = spec.network

    table = Table(title=f"{spec.scenario} (hash {spec.config_hash()[:12]})")
    table.add_column("Setting")
    table.add_column("Value", justify="right")
    table.add_row("users", str(net.num_users))
    table.add_row("bandwidth [MHz]", f"{net.total_bandwidth / 1e6:g}")
    table.add_row("k range", f"{net.k_min}..{net.k_max}")
    table.add_row("agents", ", ".join(spec.agent.kinds))
    table.add_row("action space", spec.agent.action_space)
    table.add_row("seeds", str(len(spec.seeds)))
    table.add_row(
        "I_glob at k_min",
        str(global_iterations(spec.learning, spec.gap, net.k_min, net.tau, net.num_users)),
    )
    if spec.sweep is not None:
        table.add_row("sweep", f"{spec.sweep.parameter} over {len(spec.sweep.values)} values")
    app.console.print(table)
    app.console.print("[green]OK[/green]")
    return 0
