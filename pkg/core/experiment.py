"""
Experiment files: one versioned YAML document per experiment.

Kept out of core/__init__ because it depends on the domain packages.
"""

import hashlib
from pathlib import Path
from typing import Literal

import orjson
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from agents.config import AgentConfig
from convergence import GapParams, LearningParams, global_iteration_bound, information_usage
from core.config import Settings
from core.errors import ConfigError
from core.log import get_logger
from wireless.models import NetworkConfig

logger = get_logger(__name__)

SCHEMA_VERSION = 1

# Sweep axis name -> (section, field)
SWEEP_AXES: dict[str, tuple[str, str]] = {
    "tau": ("network", "tau"),
    "L": ("learning", "L"),
    "varrho": ("learning", "global_accuracy"),
    "U": ("network", "num_users"),
    "p_max": ("network", "p_max"),
}
BOUND_AXES = ("tau", "L", "varrho", "U")
TRAINING_AXES = ("U", "p_max")


class SweepAxis(BaseModel):
    """One swept parameter and its values."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: Literal["tau", "L", "varrho", "U", "p_max"]
    values: tuple[float, ...] = Field(min_length=1)
    k_step: int = Field(1, ge=1, description="k grid spacing for bound sweeps")


class ExperimentSpec(BaseModel):
    """A fully validated experiment."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: str = "default"
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    learning: LearningParams = Field(default_factory=LearningParams)
    gap: GapParams = Field(default_factory=GapParams)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    sweep: SweepAxis | None = None
    seeds: tuple[int, ...] = Field((0,), min_length=1)
    output_dir: str = "runs"

    @model_validator(mode="after")
    def _check_sample_counts(self) -> "ExperimentSpec":
        if len(self.gap.m_u) not in (1, self.network.num_users):
            raise ValueError(
                f"gap.m_u has {len(self.gap.m_u)} entries; expected 1 or num_users={self.network.num_users}"
            )
        return self

    def with_axis_value(self, axis: str, value: float) -> "ExperimentSpec":
        """
        Copy of this spec with one sweep axis set, fully re-validated.

        Raises:
            ConfigError: If the axis is unknown or the value is invalid
        """
        if axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis '{axis}'", field="sweep.parameter")
        section, name = SWEEP_AXES[axis]
        data = self.model_dump()
        data[section][name] = int(value) if name == "num_users" else float(value)
        return _validate(data)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form (sorted keys)."""
        payload = orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)
        return hashlib.sha256(payload).hexdigest()


def _validate(data: dict) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigError(first["msg"], field=field) from e


def check_regime(spec: ExperimentSpec) -> None:
    """
    Reject parameter sets whose bounds are undefined or divergent.

    Psi is smallest at k_min, which is where the global-iteration
    denominator is smallest; the largest reachable local accuracy is the
    worst case for the -varpi*mu term.

    Raises:
        ConfigError: If H_pz is below the information usage at k_min
        DivergentRegimeError: If the denominator is not positive
    """
    net, gap = spec.network, spec.gap
    usage = information_usage(gap.c0, gap.c1, net.k_min, net.tau)
    if gap.H_pz < usage:
        raise ConfigError(
            f"H_pz ({gap.H_pz}) is below the information usage {usage:.6g} at k_min={net.k_min}",
            field="gap.H_pz",
        )
    varpi = spec.agent.local_accuracy_range[1] if spec.agent.sampling_control else spec.learning.local_accuracy
    global_iteration_bound(spec.learning, gap, net.k_min, net.tau, net.num_users, varpi)


def load_config(path: str | Path, settings: Settings | None = None) -> ExperimentSpec:
    """
    Load and validate an experiment file.

    Args:
        path: YAML file
        settings: Process settings; FLSIM_OUTPUT_DIR overrides output_dir

    Raises:
        ConfigError: Unreadable, unparsable or invalid file
        DivergentRegimeError: Parameters outside the contractive regime
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")

    settings = settings or Settings.from_env()
    if settings.output_dir:
        data = {**data, "output_dir": settings.output_dir}

    spec = _validate(data)
    check_regime(spec)
    logger.debug("[Experiment] Loaded '%s' from %s (hash %s)", spec.scenario, path, spec.config_hash()[:12])
    return spec
