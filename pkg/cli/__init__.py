"""
Command-line client.
"""

from .client import SimulatorApp, EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, EXIT_DIVERGENT
from .command import SimulatorCommand, command

__all__ = [
    "SimulatorApp",
    "SimulatorCommand",
    "command",
    "EXIT_OK",
    "EXIT_FAILURE",
    "EXIT_CONFIG",
    "EXIT_DIVERGENT",
]
