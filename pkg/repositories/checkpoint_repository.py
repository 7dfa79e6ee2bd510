"""
Repository for network checkpoints.

File layout:
    line 1   b"FLSIM-CKPT\\n"
    line 2   JSON header terminated by b"\\n":
             {"version": 1, "dtype": "<f8", "order": "C",
              "networks": [{"name", "layer_sizes", "activations"}, ...],
              "metadata": {...}, "sha256": <hex digest of the payload>}
    rest     payload: for each network in header order, W0, b0, W1, b1, ...
             as little-endian float64 in row-major order
"""

import hashlib
from pathlib import Path

import numpy as np
import orjson

from approximator.mlp import MlpParams, check_finite
from core.errors import CheckpointError, DomainError

MAGIC = b"FLSIM-CKPT\n"
VERSION = 1
_DTYPE = np.dtype("<f8")


def _shapes(layer_sizes: list[int]) -> list[tuple[int, ...]]:
    shapes = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        shapes.extend([(fan_in, fan_out), (fan_out,)])
    return shapes


class CheckpointRepository:
    """Saves and loads named sets of networks."""

    def save(self, path: Path, networks: dict[str, MlpParams], metadata: dict | None = None) -> Path:
        """
        Write networks to path.

        Raises:
            CheckpointError: If a network holds non-finite values
        """
        entries = []
        chunks = []
        for name, params in networks.items():
            try:
                check_finite(params)
            except DomainError as e:
                raise CheckpointError(f"network '{name}': {e}") from e
            entries.append(
                {"name": name, "layer_sizes": params.layer_sizes, "activations": list(params.activations)}
            )
            chunks.extend(np.ascontiguousarray(a, dtype=_DTYPE).tobytes(order="C") for a in params.arrays())
        payload = b"".join(chunks)

        header = {
            "version": VERSION,
            "dtype": _DTYPE.str,
            "order": "C",
            "networks": entries,
            "metadata": metadata or {},
            "sha256": hashlib.sha256(payload).hexdigest(),
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(MAGIC + orjson.dumps(header, option=orjson.OPT_SORT_KEYS) + b"\n" + payload)
        return path

    def load(self, path: Path) -> tuple[dict[str, MlpParams], dict]:
        """
        Read networks and metadata back.

        Raises:
            CheckpointError: Bad magic, unsupported version, checksum or size mismatch
        """
        try:
            blob = Path(path).read_bytes()
        except OSError as e:
            raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
        if not blob.startswith(MAGIC):
            raise CheckpointError(f"{path} is not a checkpoint file")

        end = blob.find(b"\n", len(MAGIC))
        if end < 0:
            raise CheckpointError(f"{path} has no header")
        try:
            header = orjson.loads(blob[len(MAGIC):end])
        except orjson.JSONDecodeError as e:
            raise CheckpointError(f"{path} has a malformed header: {e}") from e
        if header.get("version") != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")

        payload = blob[end + 1:]
        if hashlib.sha256(payload).hexdigest() != header.get("sha256"):
            raise CheckpointError(f"{path} failed its checksum")

        values = np.frombuffer(payload, dtype=_DTYPE)
        offset = 0
        networks = {}
        for entry in header["networks"]:
            arrays = []
            for shape in _shapes(entry["layer_sizes"]):
                size = int(np.prod(shape))
                if offset + size > len(values):
                    raise CheckpointError(f"{path} payload is shorter than its header describes")
                arrays.append(values[offset:offset + size].reshape(shape).astype(float))
                offset += size
            networks[entry["name"]] = MlpParams(
                weights=tuple(arrays[0::2]),
                biases=tuple(arrays[1::2]),
                activations=tuple(entry["activations"]),
            )
        if offset != len(values):
            raise CheckpointError(f"{path} payload is longer than its header describes")
        return networks, header.get("metadata", {})
