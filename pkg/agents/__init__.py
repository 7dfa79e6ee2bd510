"""
RL environment adapter, agents and the training loop.
"""

from .config import AgentConfig, AGENT_KINDS
from .env import FLEnvironment, StepInfo, StepResult, normalize_gains
from .replay import Transition, Batch, ReplayBuffer
from .critic import critic_loss_and_grads, polyak_update
from .sac import (
    SacAgent,
    SacNetworks,
    sac_target,
    sac_update,
    actor_loss_and_grads,
    init_sac_networks,
    temperature_loss_and_grad,
)
from .ddpg import DdpgAgent, DdpgNetworks, ddpg_target
from .random_agent import RandomAgent
from .trainer import TrainResult, train, train_run, evaluate, warmup_action

__all__ = [
    "AgentConfig",
    "AGENT_KINDS",
    "FLEnvironment",
    "StepInfo",
    "StepResult",
    "normalize_gains",
    "Transition",
    "Batch",
    "ReplayBuffer",
    "critic_loss_and_grads",
    "polyak_update",
    "SacAgent",
    "SacNetworks",
    "sac_target",
    "sac_update",
    "actor_loss_and_grads",
    "init_sac_networks",
    "temperature_loss_and_grad",
    "DdpgAgent",
    "DdpgNetworks",
    "ddpg_target",
    "RandomAgent",
    "TrainResult",
    "train",
    "train_run",
    "evaluate",
    "warmup_action",
]
