"""
Experience replay.
"""

from dataclasses import dataclass

import numpy as np

from constraints import FeasibleAction
from core.errors import EmptyInputError, StructuralError


@dataclass(frozen=True)
class Transition:
    """One (s, a, r, s', done) tuple; feasible is the executed action, kept for diagnostics."""
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool
    feasible: FeasibleAction | None = None


@dataclass(frozen=True)
class Batch:
    """Column-stacked transitions."""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray

    def __len__(self) -> int:
        return len(self.rewards)


class ReplayBuffer:
    """
    Bounded FIFO with uniform sampling.

    Storage is preallocated; once full, the oldest transition is overwritten.
    """

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity < 1:
            raise StructuralError(f"capacity must be at least 1, got {capacity}")
        self.capacity = capacity
        self._states = np.zeros((capacity, state_dim))
        self._actions = np.zeros((capacity, action_dim))
        self._rewards = np.zeros(capacity)
        self._next_states = np.zeros((capacity, state_dim))
        self._dones = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, transition: Transition) -> None:
        """Store a transition, evicting the oldest when full."""
        i = self._next
        self._states[i] = transition.state
        self._actions[i] = transition.action
        self._rewards[i] = transition.reward
        self._next_states[i] = transition.next_state
        self._dones[i] = float(transition.done)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample_indices(self, batch_size: int, rng: np.random.Generator) -> np.ndarray:
        """
        Uniform indices over stored transitions, with replacement.

        Raises:
            EmptyInputError: Fewer stored transitions than batch_size
        """
        if self._size < batch_size:
            raise EmptyInputError(f"buffer holds {self._size} transitions, batch needs {batch_size}")
        return rng.integers(0, self._size, size=batch_size)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        idx = self.sample_indices(batch_size, rng)
        return Batch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            dones=self._dones[idx],
        )
