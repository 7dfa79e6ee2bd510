"""
Random baseline: a uniformly drawn feasible action every step.
"""

import numpy as np

from agents.env import FLEnvironment
from constraints import sample_feasible_action


class RandomAgent:
    """Never learns; its actions are expressed in the environment's agent scale."""

    def __init__(self, env: FLEnvironment, rng: np.random.Generator):
        self._env = env
        self._rng = rng

    def act(self, observation: np.ndarray, explore: bool = True) -> np.ndarray:
        env = self._env
        action = sample_feasible_action(
            env.network, self._rng, env.agent.sampling_control, env.agent.local_accuracy_range
        )
        return env.agent_from_feasible(action)

    def update(self, batch) -> None:
        return None

    def networks(self) -> dict:
        return {}
