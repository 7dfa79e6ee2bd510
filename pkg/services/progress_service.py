"""
Progress reporting for long runs.

Uses event-driven architecture - subscribes to events instead of being
called from the training loop.
"""

from core.events import CheckpointEvent, EpisodeEvent, EventBus, EventType, RunEvent, SweepEvent
from core.log import get_logger

logger = get_logger(__name__)


class ProgressService:
    """
    Logs run lifecycle events.

    Features:
    - One line when a run starts and when it finishes, with its summary
    - Episode lines every `episode_every` episodes
    - Sweep and checkpoint notices
    """

    def __init__(self, event_bus: EventBus, episode_every: int = 50):
        """
        Args:
            event_bus: Event bus for receiving events
            episode_every: Log every n-th episode (0 disables episode lines)
        """
        self._event_bus = event_bus
        self._episode_every = episode_every
        self.runs_finished = 0
        self.episodes_seen = 0

    def start(self) -> None:
        """Subscribe to events."""
        self._event_bus.subscribe(EventType.RUN_STARTED, self._on_run_started)
        self._event_bus.subscribe(EventType.RUN_FINISHED, self._on_run_finished)
        self._event_bus.subscribe(EventType.EPISODE_FINISHED, self._on_episode)
        self._event_bus.subscribe(EventType.SWEEP_FINISHED, self._on_sweep)
        self._event_bus.subscribe(EventType.CHECKPOINT_SAVED, self._on_checkpoint)

    def stop(self) -> None:
        """Unsubscribe from events."""
        self._event_bus.unsubscribe(EventType.RUN_STARTED, self._on_run_started)
        self._event_bus.unsubscribe(EventType.RUN_FINISHED, self._on_run_finished)
        self._event_bus.unsubscribe(EventType.EPISODE_FINISHED, self._on_episode)
        self._event_bus.unsubscribe(EventType.SWEEP_FINISHED, self._on_sweep)
        self._event_bus.unsubscribe(EventType.CHECKPOINT_SAVED, self._on_checkpoint)

    def _on_run_started(self, event: RunEvent) -> None:
        logger.info("[ProgressService] %s started (seed %d)", event.run_id, event.seed)

    def _on_run_finished(self, event: RunEvent) -> None:
        self.runs_finished += 1
        if event.summary:
            logger.info(
                "[ProgressService] %s finished: %d episodes, final reward %.4g",
                event.run_id,
                event.summary["episodes"],
                event.summary["final_reward"],
            )
        else:
            logger.warning("[ProgressService] %s finished without a complete episode", event.run_id)

    def _on_episode(self, event: EpisodeEvent) -> None:
        self.episodes_seen += 1
        record = event.record
        if self._episode_every and record.episode % self._episode_every == 0:
            logger.info(
                "[ProgressService] %s episode %d: reward %.4g, energy %.4g J",
                record.run_id,
                record.episode,
                record.total_reward,
                record.energy_total,
            )

    def _on_sweep(self, event: SweepEvent) -> None:
        logger.info("[ProgressService] Sweep over %s: %d cells (%d divergent)", event.axis, event.rows, event.divergent_rows)

    def _on_checkpoint(self, event: CheckpointEvent) -> None:
        logger.debug("[ProgressService] Checkpoint for %s at %s", event.run_id, event.path)
