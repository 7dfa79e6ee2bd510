"""
Repository for per-episode metrics and their summaries.
"""

import csv
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import get_args

from core.errors import EmptyInputError, StructuralError


@dataclass(frozen=True)
class MetricsRecord:
    """One finished training episode."""
    run_id: str
    agent: str
    axis_value: float | None
    seed: int
    episode: int
    total_reward: float
    energy_sampling: float
    energy_computation: float
    energy_transmission: float
    p1: float
    p2: float
    completion_time: float
    global_iterations: int
    steps: int

    @property
    def energy_total(self) -> float:
        return self.energy_sampling + self.energy_computation + self.energy_transmission


@dataclass(frozen=True)
class SummaryRow:
    """Seed-averaged figures for one (agent, axis value)."""
    agent: str
    axis_value: float | None
    seeds: int
    episodes: int
    mean_reward: float
    final_reward: float
    mean_energy_sampling: float
    mean_energy_computation: float
    mean_energy_transmission: float
    mean_completion_time: float
    mean_p1: float
    mean_p2: float


RECORD_FIELDS = [f.name for f in fields(MetricsRecord)]
SUMMARY_FIELDS = [f.name for f in fields(SummaryRow)]

def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _parse(annotation, text: str):
    """Convert a cell using its field annotation; empty cells of optional fields are None."""
    if annotation is str:
        return text
    if text == "":
        return None
    kinds = get_args(annotation) or (annotation,)
    if int in kinds:
        return int(text)
    return float(text)


def write_rows(path: Path, header: list[str], rows: list) -> None:
    """Write dataclass rows as a header-first CSV (floats in round-trip repr form)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            data = asdict(row)
            writer.writerow([_format(data[name]) for name in header])


def read_rows(path: Path, row_type):
    """Read a CSV written by write_rows back into dataclass rows."""
    names = [f.name for f in fields(row_type)]
    types = {f.name: f.type for f in fields(row_type)}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != names:
            raise StructuralError(f"{path} has header {header}, expected {names}")
        return [row_type(**{n: _parse(types[n], v) for n, v in zip(names, line)}) for line in reader]


def summarize(records: list[MetricsRecord], final_fraction: float = 0.1) -> list[SummaryRow]:
    """
    Average records per (agent, axis value), first per seed then across seeds.

    final_reward is the mean over each seed's last final_fraction of episodes.

    Raises:
        EmptyInputError: If there are no records
    """
    if not records:
        raise EmptyInputError("no metrics records to summarize")

    groups: dict[tuple[str, float | None], dict[int, list[MetricsRecord]]] = {}
    for rec in records:
        groups.setdefault((rec.agent, rec.axis_value), {}).setdefault(rec.seed, []).append(rec)

    def seed_mean(per_seed: dict[int, list[MetricsRecord]], attr: str) -> float:
        return sum(sum(getattr(r, attr) for r in recs) / len(recs) for recs in per_seed.values()) / len(per_seed)

    summary = []
    for (agent, axis_value), per_seed in groups.items():
        finals = []
        for recs in per_seed.values():
            ordered = sorted(recs, key=lambda r: r.episode)
            tail = ordered[-max(1, math.ceil(final_fraction * len(ordered))):]
            finals.append(sum(r.total_reward for r in tail) / len(tail))
        summary.append(
            SummaryRow(
                agent=agent,
                axis_value=axis_value,
                seeds=len(per_seed),
                episodes=sum(len(recs) for recs in per_seed.values()),
                mean_reward=seed_mean(per_seed, "total_reward"),
                final_reward=sum(finals) / len(finals),
                mean_energy_sampling=seed_mean(per_seed, "energy_sampling"),
                mean_energy_computation=seed_mean(per_seed, "energy_computation"),
                mean_energy_transmission=seed_mean(per_seed, "energy_transmission"),
                mean_completion_time=seed_mean(per_seed, "completion_time"),
                mean_p1=seed_mean(per_seed, "p1"),
                mean_p2=seed_mean(per_seed, "p2"),
            )
        )
    return summary


class MetricsRepository:
    """
    Stores episode records and summaries as delimited text.

    Records arrive in deterministic (agent, axis value, seed, episode) order
    from the training service; the files are written in that order.
    """

    def __init__(self, episodes_path: Path, summary_path: Path):
        """
        Args:
            episodes_path: Per-episode CSV
            summary_path: Summary CSV
        """
        self._episodes_path = Path(episodes_path)
        self._summary_path = Path(summary_path)
        self._pending: list[MetricsRecord] = []

    def append(self, record: MetricsRecord) -> None:
        """Buffer a record until flush()."""
        self._pending.append(record)

    def flush(self) -> list[MetricsRecord]:
        """
        Write all buffered records and their summary.

        Returns:
            The records written
        """
        records = list(self._pending)
        write_rows(self._episodes_path, RECORD_FIELDS, records)
        write_rows(self._summary_path, SUMMARY_FIELDS, summarize(records) if records else [])
        return records

    def load_records(self) -> list[MetricsRecord]:
        return read_rows(self._episodes_path, MetricsRecord)

    def load_summary(self) -> list[SummaryRow]:
        return read_rows(self._summary_path, SummaryRow)
