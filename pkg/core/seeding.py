"""
Seed protocol: one master seed per run, one child stream per component.

Child streams are keyed by component name rather than by spawn order, so
adding a new component never shifts the streams of existing ones.
"""

import zlib
from dataclasses import dataclass

import numpy as np


def component_rng(master_seed: int, component: str) -> np.random.Generator:
    """
    Derive a generator for one component from the master seed.

    Args:
        master_seed: Run-level seed
        component: Stable component name (e.g. "channel")

    Returns:
        Independent PCG64 generator
    """
    key = zlib.crc32(component.encode("utf-8"))
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class RngStreams:
    """Per-component random streams for one training run."""

    channel: np.random.Generator
    policy: np.random.Generator
    buffer: np.random.Generator
    init: np.random.Generator
    exploration: np.random.Generator

    @classmethod
    def from_seed(cls, master_seed: int) -> "RngStreams":
        """Build every stream from a master seed."""
        return cls(
            channel=component_rng(master_seed, "channel"),
            policy=component_rng(master_seed, "policy"),
            buffer=component_rng(master_seed, "buffer"),
            init=component_rng(master_seed, "init"),
            exploration=component_rng(master_seed, "exploration"),
        )
