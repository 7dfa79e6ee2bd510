"""
Shared fixtures: small scenarios that keep every test fast.
"""

from pathlib import Path

import pytest
import yaml

from core.config import Settings
from core.experiment import ExperimentSpec

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

# Contractive parameter set: with these constants the real-valued bound
# spans about 94 (zero information usage) to 102337 (usage equal to H_pz).
BOUND_DATA = {
    "scenario": "bounds",
    "network": {"num_users": 10, "tau": 0.01, "k_min": 0, "k_max": 100},
    "learning": {"L": 100.0, "mu": 10.0, "xi": 1.0, "delta": 0.005, "local_accuracy": 0.1, "global_accuracy": 0.01},
    "gap": {"c0": 3.0, "c1": 2.0, "H_Z": 5.0, "H_pz": 4.5},
    "agent": {"action_space": "paper-strict"},
}

TINY_DATA = {
    "scenario": "tiny",
    "network": {"num_users": 2, "k_min": 0, "k_max": 20, "tau": 0.01},
    "learning": {"L": 100.0, "mu": 10.0, "local_accuracy": 0.5, "global_accuracy": 0.01},
    "gap": {"c0": 1.9, "c1": 2.3, "H_Z": 9.0, "H_pz": 2.0},
    "agent": {
        "kinds": ["a2c_ei", "random"],
        "action_space": "paper-strict",
        "hidden_sizes": [8],
        "batch_size": 4,
        "buffer_capacity": 64,
        "episode_length": 5,
        "total_steps": 30,
        "warmup_steps": 6,
    },
    "seeds": [0, 1],
}


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@pytest.fixture
def settings(tmp_path) -> Settings:
    """Settings that send outputs to a temporary directory."""
    return Settings(output_dir=str(tmp_path / "out"), log_level="WARNING", workers=1)


@pytest.fixture
def bound_spec() -> ExperimentSpec:
    return ExperimentSpec.model_validate(BOUND_DATA)


@pytest.fixture
def tiny_data() -> dict:
    return _merge(TINY_DATA, {})


@pytest.fixture
def tiny_spec(tmp_path) -> ExperimentSpec:
    return ExperimentSpec.model_validate(_merge(TINY_DATA, {"output_dir": str(tmp_path / "tiny")}))


@pytest.fixture
def make_spec():
    """Build a spec from one of the base scenarios with nested overrides."""

    def build(base: str = "tiny", **overrides) -> ExperimentSpec:
        data = TINY_DATA if base == "tiny" else BOUND_DATA
        return ExperimentSpec.model_validate(_merge(data, overrides))

    return build


@pytest.fixture
def write_config(tmp_path):
    """Write a mapping (or raw text) as an experiment file and return its path."""

    def write(data, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        text = data if isinstance(data, str) else yaml.safe_dump(data, sort_keys=False)
        path.write_text(text, encoding="utf-8")
        return path

    return write
