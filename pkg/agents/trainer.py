"""
Off-policy training loop shared by every agent kind.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

import numpy as np

from agents.config import AGENT_KINDS
from agents.ddpg import DdpgAgent
from agents.env import FLEnvironment, StepResult
from agents.random_agent import RandomAgent
from agents.replay import ReplayBuffer, Transition
from agents.sac import SacAgent
from approximator import MlpParams
from constraints import sample_feasible_action
from core.errors import ConfigError
from core.log import get_logger
from core.seeding import RngStreams
from repositories.metrics_repository import MetricsRecord

if TYPE_CHECKING:
    from core.experiment import ExperimentSpec

logger = get_logger(__name__)

_ACTION_LIMIT = 1.0 - 1e-6


class Agent(Protocol):
    def act(self, observation: np.ndarray, explore: bool = True) -> np.ndarray: ...

    def update(self, batch) -> object: ...

    def networks(self) -> dict[str, MlpParams]: ...


@dataclass
class TrainResult:
    """Outcome of one (agent kind, seed) run."""
    run_id: str
    agent_kind: str
    seed: int
    records: list[MetricsRecord] = field(default_factory=list)
    networks: dict[str, MlpParams] = field(default_factory=dict)


class _EpisodeTally:
    """Accumulates one episode's step results."""

    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self.reward = 0.0
        self.sampling = 0.0
        self.computation = 0.0
        self.transmission = 0.0
        self.p1 = 0.0
        self.p2 = 0.0
        self.completion_time = 0.0
        self.global_iterations = 0
        self.steps = 0

    def add(self, result: StepResult) -> None:
        terms = result.info.terms
        self.reward += result.reward
        self.sampling += terms.energy.sampling
        self.computation += terms.energy.computation
        self.transmission += terms.energy.transmission
        self.p1 += terms.p1
        self.p2 += terms.p2
        self.completion_time += terms.round_time
        self.global_iterations = result.info.global_iterations
        self.steps += 1

    def record(self, run_id: str, agent: str, axis_value: float | None, seed: int, episode: int) -> MetricsRecord:
        return MetricsRecord(
            run_id=run_id,
            agent=agent,
            axis_value=axis_value,
            seed=seed,
            episode=episode,
            total_reward=float(self.reward),
            energy_sampling=float(self.sampling),
            energy_computation=float(self.computation),
            energy_transmission=float(self.transmission),
            p1=float(self.p1),
            p2=float(self.p2),
            completion_time=float(self.completion_time),
            global_iterations=int(self.global_iterations),
            steps=self.steps,
        )


def warmup_action(env: FLEnvironment, rng: np.random.Generator) -> np.ndarray:
    """A uniformly drawn feasible action in agent scale, clipped to the policy's open box."""
    feasible = sample_feasible_action(env.network, rng, env.agent.sampling_control, env.agent.local_accuracy_range)
    return np.clip(env.agent_from_feasible(feasible), -_ACTION_LIMIT, _ACTION_LIMIT)


def build_environment(agent_kind: str, spec: "ExperimentSpec", streams: RngStreams) -> FLEnvironment:
    """sac_plain runs on the clip mapping; everything else on ECS squashing."""
    return FLEnvironment(
        spec.network,
        spec.learning,
        spec.gap,
        spec.agent,
        streams.channel,
        mapping="clip" if agent_kind == "sac_plain" else "ecs",
    )


def build_agent(agent_kind: str, env: FLEnvironment, spec: "ExperimentSpec", streams: RngStreams) -> Agent:
    """
    Raises:
        ConfigError: Unknown agent kind
    """
    if agent_kind in ("a2c_ei", "sac_plain"):
        return SacAgent(env.observation_dim, env.action_dim, spec.agent, streams.init, streams.policy)
    if agent_kind == "ddpg":
        return DdpgAgent(env.observation_dim, env.action_dim, spec.agent, streams.init, streams.exploration)
    if agent_kind == "random":
        return RandomAgent(env, streams.policy)
    raise ConfigError(f"unknown agent kind '{agent_kind}', expected one of {AGENT_KINDS}", field="agent.kinds")


def train_run(
    agent_kind: str,
    spec: "ExperimentSpec",
    seed: int,
    run_id: str | None = None,
    axis_value: float | None = None,
    on_episode: Callable[[MetricsRecord], None] | None = None,
) -> TrainResult:
    """
    Run T_step environment steps for one agent and seed.

    Learning agents take uniformly drawn feasible actions for the first
    warmup_steps steps, then one gradient update per step once the buffer
    holds a batch. Stored rewards are scaled by reward_scale; records are not.
    A trailing incomplete episode is not recorded.
    """
    cfg = spec.agent
    run_id = run_id or f"{agent_kind}-s{seed}"
    streams = RngStreams.from_seed(seed)
    env = build_environment(agent_kind, spec, streams)
    agent = build_agent(agent_kind, env, spec, streams)
    learner = agent_kind != "random"
    buffer = ReplayBuffer(cfg.buffer_capacity, env.observation_dim, env.action_dim) if learner else None

    result = TrainResult(run_id=run_id, agent_kind=agent_kind, seed=seed)
    tally = _EpisodeTally()
    observation = env.reset()
    for t in range(cfg.total_steps):
        if learner and t < cfg.warmup_steps:
            action = warmup_action(env, streams.exploration)
        else:
            action = agent.act(observation)

        step = env.step(env.raw_from_agent(action))
        tally.add(step)

        if learner:
            buffer.add(
                Transition(
                    state=observation,
                    action=action,
                    reward=cfg.reward_scale * step.reward,
                    next_state=step.observation,
                    done=step.done,
                )
            )
            if t >= cfg.warmup_steps and len(buffer) >= cfg.batch_size:
                agent.update(buffer.sample(cfg.batch_size, streams.buffer))

        observation = step.observation
        if step.done:
            record = tally.record(run_id, agent_kind, axis_value, seed, len(result.records))
            result.records.append(record)
            if on_episode is not None:
                on_episode(record)
            tally.reset()
            observation = env.reset()

    result.networks = agent.networks()
    logger.debug("[Trainer] %s finished %d episodes", run_id, len(result.records))
    return result


def train(agent_kind: str, spec: "ExperimentSpec", seeds: list[int] | None = None) -> list[MetricsRecord]:
    """Learning-curve records of one agent kind over several seeds, in seed order."""
    records = []
    for seed in seeds if seeds is not None else spec.seeds:
        records.extend(train_run(agent_kind, spec, seed).records)
    return records


def evaluate(
    agent_kind: str,
    spec: "ExperimentSpec",
    networks: dict[str, MlpParams],
    seed: int,
    episodes: int = 1,
) -> list[MetricsRecord]:
    """
    Greedy rollouts of saved networks without learning.

    The random agent ignores networks and keeps sampling.
    """
    streams = RngStreams.from_seed(seed)
    env = build_environment(agent_kind, spec, streams)
    agent = build_agent(agent_kind, env, spec, streams)
    if networks and hasattr(agent, "load_networks"):
        agent.load_networks(networks)

    run_id = f"{agent_kind}-eval-s{seed}"
    records = []
    tally = _EpisodeTally()
    observation = env.reset()
    while len(records) < episodes:
        step = env.step(env.raw_from_agent(agent.act(observation, explore=False)))
        tally.add(step)
        observation = step.observation
        if step.done:
            records.append(tally.record(run_id, agent_kind, None, seed, len(records)))
            tally.reset()
            observation = env.reset()
    return records
