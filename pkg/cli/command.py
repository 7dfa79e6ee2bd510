"""
Command objects discovered by the application's command loader.
"""

from collections.abc import Callable
from dataclasses import dataclass


@dataclass(frozen=True)
class SimulatorCommand:
    """A CLI verb: its name, help text and typer callback."""
    name: str
    help: str
    callback: Callable


def command(name: str, help: str) -> Callable[[Callable], SimulatorCommand]:
    """Mark a function in commands/ as a CLI verb."""

    def decorator(func: Callable) -> SimulatorCommand:
        return SimulatorCommand(name=name, help=help, callback=func)

    return decorator
