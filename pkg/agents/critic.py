"""
Q-network helpers shared by the actor-critic agents.
"""

import numpy as np

from approximator import MlpParams, backward, forward, forward_with_cache
from core.errors import StructuralError


def q_input(states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Critic input rows [s, a]."""
    return np.concatenate([np.atleast_2d(states), np.atleast_2d(actions)], axis=-1)


def q_values(critic: MlpParams, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Q(s, a) for each row, shape (N,)."""
    return forward(critic, q_input(states, actions))[:, 0]


def critic_loss_and_grads(
    critic: MlpParams,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
) -> tuple[float, MlpParams]:
    """
    Mean squared Bellman error and its parameter gradients.

    Args:
        critic: Q-network
        states: (N, obs_dim)
        actions: (N, act_dim) as stored in the buffer
        targets: (N,) regression targets, treated as constants
    """
    x = q_input(states, actions)
    out, cache = forward_with_cache(critic, x)
    diff = out[:, 0] - targets
    n = len(diff)
    loss = float(np.mean(diff * diff))
    grads, _ = backward(critic, x, (2.0 * diff / n)[:, None], cache)
    return loss, grads


def polyak_update(target: MlpParams, online: MlpParams, rho: float) -> MlpParams:
    """
    target <- rho * target + (1 - rho) * online, elementwise.

    Raises:
        StructuralError: If the two networks differ in shape
    """
    t_arrays = target.arrays()
    o_arrays = online.arrays()
    if len(t_arrays) != len(o_arrays) or any(t.shape != o.shape for t, o in zip(t_arrays, o_arrays)):
        raise StructuralError("target and online networks have different shapes")
    return target.with_arrays([rho * t + (1.0 - rho) * o for t, o in zip(t_arrays, o_arrays)])
