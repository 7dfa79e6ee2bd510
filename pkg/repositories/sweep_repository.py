"""
Repository for analytic sweep tables.
"""

from dataclasses import dataclass, fields
from pathlib import Path

from repositories.metrics_repository import read_rows, write_rows


@dataclass(frozen=True)
class SweepRow:
    """
    One (axis value, k) cell.

    Divergent cells keep their coordinates with divergent=1 and empty bounds.
    """
    axis: str
    axis_value: float
    k: int
    global_iterations: int | None
    bound: float | None
    divergent: int = 0


SWEEP_FIELDS = [f.name for f in fields(SweepRow)]


class SweepRepository:
    """Writes and reads sweep_<axis>.csv tables."""

    def save(self, path: Path, rows: list[SweepRow]) -> Path:
        write_rows(Path(path), SWEEP_FIELDS, rows)
        return Path(path)

    def load(self, path: Path) -> list[SweepRow]:
        return read_rows(Path(path), SweepRow)
