"""
Training service: runs every (agent kind, axis value, seed) job of an
experiment and stores metrics, summaries, checkpoints and the manifest.

Jobs may run in worker processes; their results are republished on the
event bus in job order, so output files do not depend on the worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from agents.trainer import TrainResult, train_run
from core.errors import ConfigError
from core.events import CheckpointEvent, EpisodeEvent, EventBus, EventType, RunEvent
from core.experiment import TRAINING_AXES, ExperimentSpec, check_regime
from core.log import get_logger
from repositories import (
    CheckpointRepository,
    Manifest,
    ManifestRepository,
    MetricsRecord,
    MetricsRepository,
    RunDirectory,
    SummaryRow,
    summarize,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class TrainingJob:
    agent_kind: str
    spec: ExperimentSpec
    seed: int
    run_id: str
    axis_value: float | None = None


@dataclass
class TrainingOutcome:
    records: list[MetricsRecord]
    summary: list[SummaryRow]


def plan_jobs(spec: ExperimentSpec) -> list[TrainingJob]:
    """
    Expand an experiment into jobs ordered by agent kind, axis value, seed.

    Raises:
        ConfigError: Sweep axis that training cannot vary
        DivergentRegimeError: A sweep cell outside the contractive regime
    """
    cells: list[tuple[float | None, ExperimentSpec]] = [(None, spec)]
    axis = None
    if spec.sweep is not None:
        axis = spec.sweep.parameter
        if axis not in TRAINING_AXES:
            raise ConfigError(
                f"'{axis}' cannot be swept in training; expected one of {TRAINING_AXES}", field="sweep.parameter"
            )
        cells = []
        for value in spec.sweep.values:
            cell = spec.with_axis_value(axis, value)
            check_regime(cell)
            cells.append((float(value), cell))

    jobs = []
    for kind in spec.agent.kinds:
        for value, cell in cells:
            for seed in spec.seeds:
                tag = f"-{axis}{value:g}" if axis is not None else ""
                jobs.append(TrainingJob(kind, cell, seed, f"{kind}{tag}-s{seed}", value))
    return jobs


def _run_job(job: TrainingJob) -> TrainResult:
    return train_run(job.agent_kind, job.spec, job.seed, job.run_id, job.axis_value)


class TrainingService:
    """
    Orchestrates training runs.

    Publishes RUN_STARTED, EPISODE_FINISHED, CHECKPOINT_SAVED and
    RUN_FINISHED for every job.
    """

    def __init__(
        self,
        event_bus: EventBus,
        checkpoint_repository: CheckpointRepository,
        manifest_repository: ManifestRepository,
        workers: int = 1,
    ):
        """
        Args:
            event_bus: Event bus for progress events
            checkpoint_repository: Network checkpoint storage
            manifest_repository: Manifest storage
            workers: Worker processes; 1 runs jobs inline
        """
        self._event_bus = event_bus
        self._checkpoints = checkpoint_repository
        self._manifests = manifest_repository
        self._workers = max(1, workers)

    def run_training(self, spec: ExperimentSpec, run_dir: RunDirectory, config_path: str = "") -> TrainingOutcome:
        """Run every job, then write episodes.csv, summary.csv, checkpoints and manifest.json."""
        jobs = plan_jobs(spec)
        run_dir.ensure()
        metrics = MetricsRepository(run_dir.episodes_csv, run_dir.summary_csv)
        logger.info("[TrainingService] %d jobs on %d worker(s)", len(jobs), self._workers)

        if self._workers == 1:
            for job in jobs:
                self._announce_start(job)
                result = train_run(
                    job.agent_kind,
                    job.spec,
                    job.seed,
                    job.run_id,
                    job.axis_value,
                    on_episode=lambda record: self._record(metrics, record),
                )
                self._finish(result, run_dir)
        else:
            with ProcessPoolExecutor(max_workers=self._workers) as pool:
                for job, result in zip(jobs, pool.map(_run_job, jobs)):
                    self._announce_start(job)
                    for record in result.records:
                        self._record(metrics, record)
                    self._finish(result, run_dir)

        records = metrics.flush()
        summary = summarize(records) if records else []
        self._manifests.save(
            run_dir.manifest,
            Manifest(
                command="train",
                scenario=spec.scenario,
                config_hash=spec.config_hash(),
                seeds=list(spec.seeds),
                inputs=[config_path] if config_path else [],
                outputs=[run_dir.episodes_csv.name, run_dir.summary_csv.name],
                extra={
                    "agents": list(spec.agent.kinds),
                    "axis": spec.sweep.parameter if spec.sweep else None,
                    "num_users": spec.network.num_users,
                },
            ),
        )
        return TrainingOutcome(records=records, summary=summary)

    def _announce_start(self, job: TrainingJob) -> None:
        self._event_bus.publish(
            RunEvent(event_type=EventType.RUN_STARTED, run_id=job.run_id, agent_kind=job.agent_kind, seed=job.seed, source="train")
        )

    def _record(self, metrics: MetricsRepository, record: MetricsRecord) -> None:
        metrics.append(record)
        self._event_bus.publish(EpisodeEvent(event_type=EventType.EPISODE_FINISHED, record=record, source="train"))

    def _finish(self, result: TrainResult, run_dir: RunDirectory) -> None:
        if result.networks:
            path = self._checkpoints.save(
                run_dir.checkpoint(result.run_id),
                result.networks,
                metadata={"run_id": result.run_id, "agent": result.agent_kind, "seed": result.seed},
            )
            self._event_bus.publish(
                CheckpointEvent(event_type=EventType.CHECKPOINT_SAVED, run_id=result.run_id, path=str(path), source="train")
            )

        summary = None
        if result.records:
            row = summarize(result.records)[0]
            summary = {"episodes": row.episodes, "mean_reward": row.mean_reward, "final_reward": row.final_reward}
        self._event_bus.publish(
            RunEvent(
                event_type=EventType.RUN_FINISHED,
                run_id=result.run_id,
                agent_kind=result.agent_kind,
                seed=result.seed,
                summary=summary,
                source="train",
            )
        )
