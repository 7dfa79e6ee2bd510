"""
RL environment over the wireless model.

State is the vector of current channel gains. Users are dropped at reset
and keep their positions for the episode; shadowing is redrawn every step.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from agents.config import AgentConfig
from constraints import (
    FeasibleAction,
    RewardTerms,
    action_dimension,
    clip_action,
    default_data_penalty,
    squash_action,
    step_reward,
    unclip_action,
    unsquash_action,
)
from convergence import GapParams, LearningParams, global_iterations
from core.errors import StructuralError
from wireless.channel import draw_population, redraw_gains
from wireless.models import NetworkConfig, UserPopulation

ActionMapping = Literal["ecs", "clip"]


def normalize_gains(gains: np.ndarray, cfg: NetworkConfig) -> np.ndarray:
    """Gains in dB relative to the 1 km path loss, in units of the shadowing std."""
    return (10.0 * np.log10(gains) + cfg.pathloss_a) / max(cfg.shadow_sigma, 1.0)


@dataclass(frozen=True)
class StepInfo:
    """Diagnostics of one step."""
    terms: RewardTerms
    action: FeasibleAction
    global_iterations: int


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: StepInfo


class FLEnvironment:
    """
    One wireless cell running FL rounds.

    Args:
        network: Network configuration
        learning: Learning constants
        gap: Gap constants (used for the episode budget in sampling-control mode)
        agent: Agent configuration (reward coefficients, action space, horizon)
        rng: Channel stream
        mapping: "ecs" squashes raw logits; "clip" box-clips actions in [-1, 1]
        normalize: Emit normalized observations instead of linear gains
    """

    def __init__(
        self,
        network: NetworkConfig,
        learning: LearningParams,
        gap: GapParams,
        agent: AgentConfig,
        rng: np.random.Generator,
        mapping: ActionMapping = "ecs",
        normalize: bool = True,
    ):
        self.network = network
        self.learning = learning
        self.gap = gap
        self.agent = agent
        self.mapping = mapping
        self.normalize = normalize
        self._rng = rng
        self._users: UserPopulation | None = None
        self._steps = 0

    @property
    def action_dim(self) -> int:
        return action_dimension(self.network.num_users, self.agent.sampling_control)

    @property
    def observation_dim(self) -> int:
        return self.network.num_users

    @property
    def data_penalty(self) -> float:
        """lambda_2 in use: the configured value, or the cell-scaled default."""
        if self.agent.lambda_2 is not None:
            return self.agent.lambda_2
        return default_data_penalty(self.network)

    @property
    def users(self) -> UserPopulation:
        if self._users is None:
            raise StructuralError("environment has not been reset")
        return self._users

    @property
    def steps(self) -> int:
        """Steps taken in the current episode."""
        return self._steps

    def observation(self) -> np.ndarray:
        gains = self.users.channel_gain
        return normalize_gains(gains, self.network) if self.normalize else gains.copy()

    def reset(self) -> np.ndarray:
        """Drop new users, draw their gains and return the first observation."""
        self._users = draw_population(self.network, self._rng)
        self._steps = 0
        return self.observation()

    def raw_from_agent(self, agent_action: np.ndarray) -> np.ndarray:
        """Map an agent output in (-1, 1) to the environment's raw action."""
        agent_action = np.asarray(agent_action, dtype=float)
        if self.mapping == "clip":
            return agent_action
        return self.agent.logit_scale * agent_action

    def agent_from_feasible(self, action: FeasibleAction) -> np.ndarray:
        """Agent-scale vector that maps onto the given feasible action."""
        if self.mapping == "clip":
            return unclip_action(action, self.network, self.agent.local_accuracy_range)
        raw = unsquash_action(action, self.network, self.agent.local_accuracy_range)
        return raw / self.agent.logit_scale

    def to_feasible(self, raw: np.ndarray) -> tuple[FeasibleAction, float]:
        """Apply the configured mapping; returns (action, bandwidth overflow)."""
        if len(raw) != self.action_dim:
            raise StructuralError(f"action has length {len(raw)}, environment expects {self.action_dim}")
        if self.mapping == "clip":
            return clip_action(raw, self.network, self.agent.local_accuracy_range)
        return squash_action(raw, self.network, self.agent.local_accuracy_range), 0.0

    def global_iterations_for(self, action: FeasibleAction) -> int:
        """I_glob implied by an action; the mean skip stands in for per-user k."""
        k = float(np.mean(action.k)) if action.k is not None else float(self.network.k_fixed)
        return global_iterations(
            self.learning,
            self.gap,
            k,
            self.network.tau,
            self.network.num_users,
            action.local_accuracy,
        )

    def step(self, raw_action: np.ndarray) -> StepResult:
        """
        Execute one FL round.

        The episode ends after episode_length steps; in sampling-control mode
        it ends earlier once the step count reaches the global-iteration
        count implied by the current action.
        """
        raw_action = np.asarray(raw_action, dtype=float)
        action, overflow = self.to_feasible(raw_action)
        users = self.users

        terms = step_reward(
            action,
            users,
            self.network,
            self.learning,
            self.agent.lambda_1,
            self.data_penalty,
            include_sampling=self.agent.reward_includes_sampling,
            bandwidth_overflow=overflow,
            lambda_bandwidth=self.agent.lambda_bandwidth if self.mapping == "clip" else 0.0,
        )
        rounds = self.global_iterations_for(action)

        self._steps += 1
        horizon = self.agent.episode_length
        if self.agent.sampling_control:
            horizon = max(1, min(rounds, horizon))
        done = self._steps >= horizon

        self._users = redraw_gains(users, self.network, self._rng)
        return StepResult(
            observation=self.observation(),
            reward=terms.reward,
            done=done,
            info=StepInfo(terms=terms, action=action, global_iterations=rounds),
        )
