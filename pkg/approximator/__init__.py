"""
Small differentiable function approximators.
"""

from .mlp import MlpParams, init_mlp, forward, forward_with_cache, backward, check_finite
from .policy import (
    GaussianPolicyOutput,
    LOG_STD_MIN,
    LOG_STD_MAX,
    policy_head,
    squashed_log_prob,
    sample_squashed_gaussian,
    squash_noise,
    squashed_gaussian_backward,
    deterministic_action,
)
from .optim import apply_gradients, Sgd, Adam, make_optimizer

__all__ = [
    "MlpParams",
    "init_mlp",
    "forward",
    "forward_with_cache",
    "backward",
    "check_finite",
    "GaussianPolicyOutput",
    "LOG_STD_MIN",
    "LOG_STD_MAX",
    "policy_head",
    "squashed_log_prob",
    "sample_squashed_gaussian",
    "squash_noise",
    "squashed_gaussian_backward",
    "deterministic_action",
    "apply_gradients",
    "Sgd",
    "Adam",
    "make_optimizer",
]
