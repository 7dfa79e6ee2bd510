"""
Plot-data emission: delimited series files per figure kind plus a manifest.

Kinds and their files (under <run>/plot/):
    reward_curve       reward_curve_<agent>[_<axis value>].csv
                       episode, mean_reward, std_reward, seeds
    energy_vs_pmax     energy_vs_pmax.csv
                       agent, p_max, energy_sampling, energy_computation,
                       energy_transmission, energy_total, completion_time
                       (per user and per round, averaged over episodes and seeds)
    iteration_sweep    iteration_sweep_<axis>.csv, same columns as sweep_<axis>.csv
    convergence_curve  convergence_curve.csv
                       k, round, loss_gap
"""

from collections import defaultdict
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from convergence import global_iterations, loss_gap_curve
from core.errors import ConfigError, DivergentRegimeError, EmptyInputError
from core.experiment import ExperimentSpec
from core.log import get_logger
from repositories import (
    Manifest,
    ManifestRepository,
    MetricsRecord,
    MetricsRepository,
    RunDirectory,
    SweepRepository,
    write_rows,
)

logger = get_logger(__name__)

PLOT_KINDS = ("reward_curve", "energy_vs_pmax", "iteration_sweep", "convergence_curve")
MAX_CURVE_ROUNDS = 10_000


@dataclass(frozen=True)
class RewardPoint:
    episode: int
    mean_reward: float
    std_reward: float
    seeds: int


@dataclass(frozen=True)
class EnergyPoint:
    agent: str
    p_max: float
    energy_sampling: float
    energy_computation: float
    energy_transmission: float
    energy_total: float
    completion_time: float


@dataclass(frozen=True)
class CurvePoint:
    k: int
    round: int
    loss_gap: float


def _header(row_type) -> list[str]:
    return [f.name for f in fields(row_type)]


def reward_curves(records: list[MetricsRecord]) -> dict[tuple[str, float | None], list[RewardPoint]]:
    """Per (agent, axis value): reward per episode index across seeds."""
    grouped: dict[tuple[str, float | None], dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for rec in records:
        grouped[(rec.agent, rec.axis_value)][rec.episode].append(rec.total_reward)
    curves = {}
    for key, episodes in grouped.items():
        curves[key] = [
            RewardPoint(
                episode=ep,
                mean_reward=float(np.mean(values)),
                std_reward=float(np.std(values)),
                seeds=len(values),
            )
            for ep, values in sorted(episodes.items())
        ]
    return curves


def energy_vs_pmax(records: list[MetricsRecord], num_users: int) -> list[EnergyPoint]:
    """
    Per-user, per-round energy split for each (agent, p_max).

    Raises:
        EmptyInputError: If no record carries a p_max axis value
    """
    grouped: dict[tuple[str, float], list[MetricsRecord]] = defaultdict(list)
    for rec in records:
        if rec.axis_value is not None:
            grouped[(rec.agent, rec.axis_value)].append(rec)
    if not grouped:
        raise EmptyInputError("energy_vs_pmax needs records from a p_max training sweep")

    points = []
    for (agent, p_max), recs in sorted(grouped.items()):
        rounds = sum(r.steps for r in recs)
        scale = 1.0 / (rounds * num_users)
        sampling = scale * sum(r.energy_sampling for r in recs)
        computation = scale * sum(r.energy_computation for r in recs)
        transmission = scale * sum(r.energy_transmission for r in recs)
        points.append(
            EnergyPoint(
                agent=agent,
                p_max=p_max,
                energy_sampling=sampling,
                energy_computation=computation,
                energy_transmission=transmission,
                energy_total=sampling + computation + transmission,
                completion_time=sum(r.completion_time for r in recs) / rounds,
            )
        )
    return points


def convergence_curves(spec: ExperimentSpec) -> list[CurvePoint]:
    """Loss-gap decay at k_min, the midpoint and k_max; divergent skips are left out."""
    net = spec.network
    points = []
    for k in sorted({net.k_min, (net.k_min + net.k_max) // 2, net.k_max}):
        try:
            rounds = min(global_iterations(spec.learning, spec.gap, k, net.tau, net.num_users), MAX_CURVE_ROUNDS)
            curve = loss_gap_curve(spec.learning, spec.gap, k, net.tau, net.num_users, rounds)
        except DivergentRegimeError as e:
            logger.warning("[PlotDataService] Skipping k=%d: %s", k, e)
            continue
        points.extend(CurvePoint(k=k, round=n, loss_gap=float(v)) for n, v in enumerate(curve))
    return points


class PlotDataService:
    """Turns stored run outputs into plot-ready series."""

    def __init__(self, manifest_repository: ManifestRepository, sweep_repository: SweepRepository):
        """
        Args:
            manifest_repository: Manifest storage
            sweep_repository: Sweep table storage
        """
        self._manifests = manifest_repository
        self._sweeps = sweep_repository

    def emit_plot_data(self, run_dir: RunDirectory, kind: str, spec: ExperimentSpec | None = None) -> list[Path]:
        """
        Write the files of one plot kind and a plot/manifest.json.

        Raises:
            ConfigError: Unknown kind, or convergence_curve without an experiment
            EmptyInputError: The run directory holds nothing for this kind
        """
        if kind not in PLOT_KINDS:
            raise ConfigError(f"unknown plot kind '{kind}', expected one of {PLOT_KINDS}", field="kind")
        out_dir = run_dir.plot_dir
        out_dir.mkdir(parents=True, exist_ok=True)

        source = self._source_manifest(run_dir)
        inputs: list[str] = []
        written: list[Path] = []

        if kind in ("reward_curve", "energy_vs_pmax"):
            records = self._load_records(run_dir)
            inputs.append(run_dir.episodes_csv.name)
            if kind == "reward_curve":
                for (agent, axis_value), points in sorted(reward_curves(records).items(), key=lambda kv: (kv[0][0], kv[0][1] or 0.0)):
                    suffix = f"_{axis_value:g}" if axis_value is not None else ""
                    path = out_dir / f"reward_curve_{agent}{suffix}.csv"
                    write_rows(path, _header(RewardPoint), points)
                    written.append(path)
            else:
                num_users = int(source.extra.get("num_users", 1)) if source else 1
                path = out_dir / "energy_vs_pmax.csv"
                write_rows(path, _header(EnergyPoint), energy_vs_pmax(records, num_users))
                written.append(path)

        elif kind == "iteration_sweep":
            tables = sorted(run_dir.root.glob("sweep_*.csv"))
            if not tables:
                raise EmptyInputError(f"no sweep tables in {run_dir.root}")
            for table in tables:
                sidecar = table.with_suffix(".manifest.json")
                if source is None and sidecar.exists():
                    source = self._manifests.load(sidecar)
                rows = self._sweeps.load(table)
                path = out_dir / f"iteration_{table.name}"
                self._sweeps.save(path, rows)
                inputs.append(table.name)
                written.append(path)

        else:
            if spec is None:
                raise ConfigError("convergence_curve needs the experiment config", field="config")
            points = convergence_curves(spec)
            if not points:
                raise EmptyInputError("every k is in the divergent regime")
            path = out_dir / "convergence_curve.csv"
            write_rows(path, _header(CurvePoint), points)
            written.append(path)

        config_hash = spec.config_hash() if spec is not None else (source.config_hash if source else "")
        seeds = list(spec.seeds) if spec is not None else (source.seeds if source else [])
        self._manifests.save(
            out_dir / "manifest.json",
            Manifest(
                command="plot-data",
                scenario=spec.scenario if spec is not None else (source.scenario if source else ""),
                config_hash=config_hash,
                seeds=seeds,
                inputs=inputs,
                outputs=[p.name for p in written],
                extra={"kind": kind},
            ),
        )
        logger.info("[PlotDataService] Wrote %d %s file(s) to %s", len(written), kind, out_dir)
        return written

    def _source_manifest(self, run_dir: RunDirectory) -> Manifest | None:
        if run_dir.manifest.exists():
            return self._manifests.load(run_dir.manifest)
        return None

    def _load_records(self, run_dir: RunDirectory) -> list[MetricsRecord]:
        if not run_dir.episodes_csv.exists():
            raise EmptyInputError(f"no episodes.csv in {run_dir.root}")
        records = MetricsRepository(run_dir.episodes_csv, run_dir.summary_csv).load_records()
        if not records:
            raise EmptyInputError(f"{run_dir.episodes_csv} holds no records")
        return records
