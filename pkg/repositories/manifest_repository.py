"""
Repository for run manifests.

A manifest is the single serialization point of a run: inputs, seeds and
the config hash. It carries no timestamps, so reruns produce identical files.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path

import orjson

from core.errors import StructuralError


@dataclass(frozen=True)
class Manifest:
    """What a set of output files was produced from."""
    command: str
    scenario: str
    config_hash: str
    seeds: list[int]
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


class ManifestRepository:
    """Reads and writes manifest.json files."""

    def save(self, path: Path, manifest: Manifest) -> Path:
        path = Path(path)
        path.write_bytes(orjson.dumps(asdict(manifest), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2))
        return path

    def load(self, path: Path) -> Manifest:
        try:
            data = orjson.loads(Path(path).read_bytes())
            return Manifest(**data)
        except (OSError, orjson.JSONDecodeError, TypeError) as e:
            raise StructuralError(f"cannot read manifest {path}: {e}") from e
