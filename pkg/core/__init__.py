"""
Core infrastructure shared by every layer of the simulator.
"""

from .events import EventBus, Event, EventType, RunEvent, EpisodeEvent, SweepEvent, CheckpointEvent
from .config import Settings
from .errors import (
    SimulatorError,
    DomainError,
    StructuralError,
    ConfigError,
    DivergentRegimeError,
    CalibrationError,
    CheckpointError,
    EmptyInputError,
)

__all__ = [
    "EventBus",
    "Event",
    "EventType",
    "RunEvent",
    "EpisodeEvent",
    "SweepEvent",
    "CheckpointEvent",
    "Settings",
    "SimulatorError",
    "DomainError",
    "StructuralError",
    "ConfigError",
    "DivergentRegimeError",
    "CalibrationError",
    "CheckpointError",
    "EmptyInputError",
]
