"""
Repository module containing the file-backed storage layer.
"""

from .run_directory import RunDirectory
from .metrics_repository import MetricsRecord, SummaryRow, MetricsRepository, summarize, read_rows, write_rows
from .sweep_repository import SweepRow, SweepRepository
from .checkpoint_repository import CheckpointRepository
from .manifest_repository import Manifest, ManifestRepository

__all__ = [
    "RunDirectory",
    "MetricsRecord",
    "SummaryRow",
    "MetricsRepository",
    "summarize",
    "read_rows",
    "write_rows",
    "SweepRow",
    "SweepRepository",
    "CheckpointRepository",
    "Manifest",
    "ManifestRepository",
]
