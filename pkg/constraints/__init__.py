"""
Explicit constraints by squashing, ambiguous constraints by penalties.
"""

from .actions import (
    FeasibleAction,
    action_dimension,
    squash_action,
    unsquash_action,
    clip_action,
    unclip_action,
    sample_feasible_action,
    constraint_violations,
    sigmoid,
    softmax,
)
from .reward import RewardTerms, default_data_penalty, penalty_time, penalty_data, step_reward

__all__ = [
    "FeasibleAction",
    "action_dimension",
    "squash_action",
    "unsquash_action",
    "clip_action",
    "unclip_action",
    "sample_feasible_action",
    "constraint_violations",
    "sigmoid",
    "softmax",
    "RewardTerms",
    "default_data_penalty",
    "penalty_time",
    "penalty_data",
    "step_reward",
]
