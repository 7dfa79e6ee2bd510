"""
Agent and training-loop hyperparameters.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

AgentKind = Literal["a2c_ei", "sac_plain", "ddpg", "random"]
AGENT_KINDS: tuple[str, ...] = ("a2c_ei", "sac_plain", "ddpg", "random")


class AgentConfig(BaseModel):
    """Hyperparameters shared by every agent kind."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kinds: tuple[AgentKind, ...] = Field(("a2c_ei",), min_length=1)
    action_space: Literal["paper-strict", "sampling-control"] = "sampling-control"

    gamma: float = Field(0.99, ge=0, le=1, description="discount")
    alpha: float = Field(0.05, ge=0, description="entropy temperature; the starting value when tuned")
    tune_alpha: bool = False
    alpha_lr: float = Field(3e-4, ge=0)
    target_entropy_per_dim: float = Field(-1.0, description="tuning target, multiplied by the action length")
    polyak: float = Field(0.995, ge=0, lt=1, description="target averaging rho")
    actor_lr: float = Field(3e-4, ge=0)
    critic_lr: float = Field(3e-4, ge=0)
    optimizer: Literal["sgd", "adam"] = "adam"
    batch_size: int = Field(64, ge=1)
    buffer_capacity: int = Field(100_000, ge=1)
    hidden_sizes: tuple[int, ...] = (64, 64)
    activation: Literal["softplus", "tanh", "relu"] = "softplus"

    lambda_1: float = Field(-10.0, le=0, description="time penalty [1/s]")
    lambda_2: float | None = Field(None, le=0, description="data penalty [1/bit]; None scales it to the cell")
    lambda_bandwidth: float = Field(-10.0, le=0, description="overflow penalty, clip mapping only")
    reward_includes_sampling: bool = False
    reward_scale: float = Field(0.01, gt=0, description="applied to learning targets only")

    episode_length: int = Field(200, ge=1, description="fixed horizon, and the cap in sampling-control mode")
    total_steps: int = Field(20_000, ge=1, description="T_step")
    warmup_steps: int = Field(1000, ge=0)
    logit_scale: float = Field(4.0, gt=0, description="maps tanh outputs onto squashing logits")
    exploration_noise: float = Field(0.1, ge=0, description="DDPG Gaussian noise std")
    local_accuracy_range: tuple[float, float] = (0.05, 0.95)

    @model_validator(mode="after")
    def _check_ranges(self) -> "AgentConfig":
        lo, hi = self.local_accuracy_range
        if not 0 < lo <= hi < 1:
            raise ValueError(f"local_accuracy_range must satisfy 0 < lo <= hi < 1, got {self.local_accuracy_range}")
        if self.tune_alpha and self.alpha <= 0:
            raise ValueError("alpha must be positive when tune_alpha is set")
        if self.batch_size > self.buffer_capacity:
            raise ValueError("batch_size must not exceed buffer_capacity")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden_sizes must list at least one positive width")
        return self

    @property
    def sampling_control(self) -> bool:
        """Whether k and varpi are part of the action."""
        return self.action_space == "sampling-control"
