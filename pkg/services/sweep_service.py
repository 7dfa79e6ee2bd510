"""
Analytic sweep service: global-iteration bounds over k and one axis.
"""

from pathlib import Path

from convergence import global_iteration_bound, global_iterations
from core.errors import ConfigError, DivergentRegimeError
from core.events import EventBus, EventType, SweepEvent
from core.experiment import BOUND_AXES, ExperimentSpec
from core.log import get_logger
from repositories import Manifest, ManifestRepository, RunDirectory, SweepRepository, SweepRow

logger = get_logger(__name__)


def bound_sweep_rows(spec: ExperimentSpec) -> list[SweepRow]:
    """
    Evaluate I_glob on every (axis value, k) cell, k stepping from k_min to k_max.

    Cells in the divergent regime become sentinel rows.

    Raises:
        ConfigError: No sweep axis, or an axis that is not analytic
    """
    if spec.sweep is None:
        raise ConfigError("experiment has no sweep section", field="sweep")
    axis = spec.sweep.parameter
    if axis not in BOUND_AXES:
        raise ConfigError(f"'{axis}' is not a bound-sweep axis; expected one of {BOUND_AXES}", field="sweep.parameter")

    rows = []
    for value in spec.sweep.values:
        cell = spec.with_axis_value(axis, value)
        net = cell.network
        for k in range(net.k_min, net.k_max + 1, spec.sweep.k_step):
            try:
                bound = global_iteration_bound(cell.learning, cell.gap, k, net.tau, net.num_users)
                iters = global_iterations(cell.learning, cell.gap, k, net.tau, net.num_users)
            except DivergentRegimeError:
                rows.append(SweepRow(axis, float(value), k, None, None, divergent=1))
                continue
            rows.append(SweepRow(axis, float(value), k, iters, bound))
    return rows


class SweepService:
    """
    Runs bound sweeps and stores their tables.

    Publishes SWEEP_FINISHED once the table is written.
    """

    def __init__(
        self,
        event_bus: EventBus,
        sweep_repository: SweepRepository,
        manifest_repository: ManifestRepository,
    ):
        """
        Args:
            event_bus: Event bus for progress events
            sweep_repository: Sweep table storage
            manifest_repository: Manifest storage
        """
        self._event_bus = event_bus
        self._sweeps = sweep_repository
        self._manifests = manifest_repository

    def run_bound_sweep(self, spec: ExperimentSpec, run_dir: RunDirectory, config_path: str = "") -> list[SweepRow]:
        """Compute, write and announce one sweep table."""
        rows = bound_sweep_rows(spec)
        run_dir.ensure()
        axis = spec.sweep.parameter
        path = self._sweeps.save(run_dir.sweep_csv(axis), rows)

        divergent = sum(row.divergent for row in rows)
        if divergent:
            logger.warning("[SweepService] %d of %d cells are divergent", divergent, len(rows))
        self._manifests.save(
            run_dir.sweep_manifest(axis),
            Manifest(
                command="sweep",
                scenario=spec.scenario,
                config_hash=spec.config_hash(),
                seeds=list(spec.seeds),
                inputs=[config_path] if config_path else [],
                outputs=[Path(path).name],
                extra={"axis": axis, "values": list(spec.sweep.values)},
            ),
        )
        self._event_bus.publish(
            SweepEvent(event_type=EventType.SWEEP_FINISHED, axis=axis, rows=len(rows), divergent_rows=divergent, source="sweep")
        )
        return rows
