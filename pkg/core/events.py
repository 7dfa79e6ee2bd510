"""
Event bus implementation for publish/subscribe pattern.

Training and sweep services publish progress here; recorders and reporters
subscribe instead of being called directly by the loops.
"""

from abc import ABC
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any, Callable

from core.log import get_logger

logger = get_logger(__name__)


class EventType(Enum):
    """Types of events that can be published."""

    # Run lifecycle
    RUN_STARTED = auto()
    EPISODE_FINISHED = auto()
    RUN_FINISHED = auto()

    # Analytic experiments
    SWEEP_FINISHED = auto()

    # Artifacts
    CHECKPOINT_SAVED = auto()


@dataclass
class Event(ABC):
    """Base class for all events."""
    event_type: EventType
    source: str | None = field(default=None, kw_only=True)  # e.g. "train", "sweep"


@dataclass
class RunEvent(Event):
    """Start or end of one (agent, seed, axis value) training run."""
    run_id: str
    agent_kind: str
    seed: int
    summary: dict[str, float] | None = None  # Filled on RUN_FINISHED


@dataclass
class EpisodeEvent(Event):
    """A finished episode; record is a repositories.MetricsRecord."""
    record: Any


@dataclass
class SweepEvent(Event):
    """A finished analytic sweep."""
    axis: str
    rows: int
    divergent_rows: int


@dataclass
class CheckpointEvent(Event):
    """A checkpoint file was written."""
    run_id: str
    path: str


# Type for event handlers
EventHandler = Callable[[Event], None]


class EventBus:
    """
    Synchronous event bus for publish/subscribe pattern.

    Handlers run in subscription order on the publishing thread, which keeps
    record files in a deterministic order.

    Usage:
        event_bus = EventBus()

        def on_episode(event: EpisodeEvent):
            print(event.record.total_reward)

        event_bus.subscribe(EventType.EPISODE_FINISHED, on_episode)
        event_bus.publish(EpisodeEvent(event_type=EventType.EPISODE_FINISHED, record=rec))
    """

    def __init__(self):
        self._handlers: dict[EventType, list[EventHandler]] = defaultdict(list)

    def subscribe(self, event_type: EventType, handler: EventHandler) -> None:
        """
        Register a handler; handlers of one type run in registration order.

        Args:
            event_type: Event type to listen for
            handler: Called synchronously with each published event
        """
        self._handlers[event_type].append(handler)

    def unsubscribe(self, event_type: EventType, handler: EventHandler) -> bool:
        """
        Remove a handler registered with subscribe().

        Returns:
            False if the handler was not registered for event_type
        """
        handlers = self._handlers.get(event_type, [])
        if handler not in handlers:
            return False
        handlers.remove(handler)
        return True

    def publish(self, event: Event) -> None:
        """
        Deliver an event to the handlers of its type, in subscription order.

        A failing handler is logged and skipped.
        """
        for handler in list(self._handlers.get(event.event_type, [])):
            try:
                handler(event)
            except Exception as e:
                logger.error("[EventBus] Error in handler for %s: %s", event.event_type.name, e)

    def clear(self) -> None:
        """Remove all subscriptions."""
        self._handlers.clear()
