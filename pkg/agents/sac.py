"""
Soft actor-critic with twin critics and an optionally tuned temperature.

Used by both a2c_ei (ECS squashing plus penalties) and sac_plain (clip
mapping); the difference lives in the environment's action mapping.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from agents.config import AgentConfig
from agents.critic import critic_loss_and_grads, polyak_update, q_input
from agents.replay import Batch
from approximator import (
    Adam,
    MlpParams,
    Sgd,
    backward,
    deterministic_action,
    forward,
    forward_with_cache,
    init_mlp,
    make_optimizer,
    policy_head,
    sample_squashed_gaussian,
    squash_noise,
    squashed_gaussian_backward,
)


@dataclass(frozen=True)
class SacNetworks:
    policy: MlpParams
    critic1: MlpParams
    critic2: MlpParams
    target1: MlpParams
    target2: MlpParams

    def named(self) -> dict[str, MlpParams]:
        """Networks by name, for checkpoints."""
        return {
            "policy": self.policy,
            "critic1": self.critic1,
            "critic2": self.critic2,
            "target1": self.target1,
            "target2": self.target2,
        }


@dataclass
class SacOptimizers:
    policy: Sgd | Adam
    critic1: Sgd | Adam
    critic2: Sgd | Adam

    @classmethod
    def from_config(cls, cfg: AgentConfig) -> "SacOptimizers":
        return cls(
            policy=make_optimizer(cfg.optimizer, cfg.actor_lr),
            critic1=make_optimizer(cfg.optimizer, cfg.critic_lr),
            critic2=make_optimizer(cfg.optimizer, cfg.critic_lr),
        )


@dataclass(frozen=True)
class SacDiagnostics:
    critic_loss: float
    actor_loss: float
    mean_log_prob: float
    mean_q: float
    alpha: float


def init_sac_networks(obs_dim: int, act_dim: int, cfg: AgentConfig, rng: np.random.Generator) -> SacNetworks:
    """Policy emits 2*act_dim (means, log-stds); critics take [s, a]."""
    hidden = list(cfg.hidden_sizes)
    policy = init_mlp([obs_dim, *hidden, 2 * act_dim], cfg.activation, rng)
    critic1 = init_mlp([obs_dim + act_dim, *hidden, 1], cfg.activation, rng)
    critic2 = init_mlp([obs_dim + act_dim, *hidden, 1], cfg.activation, rng)
    return SacNetworks(policy, critic1, critic2, critic1.copy(), critic2.copy())


def sac_target(
    rewards: np.ndarray,
    next_states: np.ndarray,
    dones: np.ndarray,
    target_critics: tuple[MlpParams, MlpParams],
    policy: MlpParams,
    gamma: float,
    alpha: float,
    noise: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Soft Bellman targets y = r + gamma*(1 - d)*(min_i Q_targ_i(s', a') - alpha*log pi(a'|s')).

    a' is drawn from the current policy, from the given noise if supplied,
    else from rng.
    """
    head = policy_head(forward(policy, next_states))
    if noise is None:
        sample = sample_squashed_gaussian(head, rng)
    else:
        sample = squash_noise(head, noise)
    x = q_input(next_states, sample.action)
    q1 = forward(target_critics[0], x)[:, 0]
    q2 = forward(target_critics[1], x)[:, 0]
    soft_value = np.minimum(q1, q2) - alpha * sample.log_prob
    return rewards + gamma * (1.0 - dones) * soft_value


def actor_loss_and_grads(
    policy: MlpParams,
    critics: tuple[MlpParams, MlpParams],
    states: np.ndarray,
    noise: np.ndarray,
    alpha: float,
) -> tuple[float, MlpParams, float]:
    """
    Reparameterized actor objective mean(alpha*log pi(a|s) - min_i Q_i(s, a)).

    Returns:
        (loss, policy gradients, mean log-probability)
    """
    out, policy_cache = forward_with_cache(policy, states)
    sample = squash_noise(policy_head(out), noise)
    x = q_input(states, sample.action)
    q1, cache1 = forward_with_cache(critics[0], x)
    q2, cache2 = forward_with_cache(critics[1], x)
    q1, q2 = q1[:, 0], q2[:, 0]
    n = len(q1)
    loss = float(np.mean(alpha * sample.log_prob - np.minimum(q1, q2)))

    # The min routes each row's gradient through one critic
    first = q1 <= q2
    _, grad_x1 = backward(critics[0], x, np.where(first, -1.0 / n, 0.0)[:, None], cache1)
    _, grad_x2 = backward(critics[1], x, np.where(first, 0.0, -1.0 / n)[:, None], cache2)
    obs_dim = np.shape(states)[-1]
    grad_action = (grad_x1 + grad_x2)[:, obs_dim:]
    grad_log_prob = np.full(n, alpha / n)

    grad_raw = squashed_gaussian_backward(sample, grad_action, grad_log_prob)
    grads, _ = backward(policy, states, grad_raw, policy_cache)
    return loss, grads, float(np.mean(sample.log_prob))


def temperature_loss_and_grad(log_alpha: float, mean_log_prob: float, target_entropy: float) -> tuple[float, float]:
    """
    Temperature objective -log_alpha * (mean log pi + target entropy) and its derivative.

    Descending it raises alpha while the policy entropy sits below the target.
    """
    slack = mean_log_prob + target_entropy
    return -log_alpha * slack, -slack


def sac_update(
    batch: Batch,
    nets: SacNetworks,
    cfg: AgentConfig,
    optimizers: SacOptimizers,
    rng: np.random.Generator,
    alpha: float | None = None,
) -> tuple[SacNetworks, SacDiagnostics]:
    """
    One critic step, one actor step, then a polyak step on both targets.

    alpha overrides cfg.alpha (a tuned temperature).
    """
    act_dim = batch.actions.shape[1]
    alpha = cfg.alpha if alpha is None else alpha
    targets = sac_target(
        batch.rewards,
        batch.next_states,
        batch.dones,
        (nets.target1, nets.target2),
        nets.policy,
        cfg.gamma,
        alpha,
        noise=rng.standard_normal((len(batch), act_dim)),
    )
    loss1, grads1 = critic_loss_and_grads(nets.critic1, batch.states, batch.actions, targets)
    loss2, grads2 = critic_loss_and_grads(nets.critic2, batch.states, batch.actions, targets)
    critic1 = optimizers.critic1.step(nets.critic1, grads1)
    critic2 = optimizers.critic2.step(nets.critic2, grads2)

    actor_loss, policy_grads, mean_log_prob = actor_loss_and_grads(
        nets.policy,
        (critic1, critic2),
        batch.states,
        rng.standard_normal((len(batch), act_dim)),
        alpha,
    )
    policy = optimizers.policy.step(nets.policy, policy_grads)

    updated = SacNetworks(
        policy=policy,
        critic1=critic1,
        critic2=critic2,
        target1=polyak_update(nets.target1, critic1, cfg.polyak),
        target2=polyak_update(nets.target2, critic2, cfg.polyak),
    )
    diagnostics = SacDiagnostics(
        critic_loss=loss1 + loss2,
        actor_loss=actor_loss,
        mean_log_prob=mean_log_prob,
        mean_q=float(np.mean(targets)),
        alpha=alpha,
    )
    return updated, diagnostics


class SacAgent:
    """
    Stateful wrapper owning networks, optimizers and the policy stream.

    Args:
        obs_dim: Observation length
        act_dim: Action length
        cfg: Agent configuration
        init_rng: Weight initialization stream
        policy_rng: Action sampling and update noise stream
    """

    def __init__(
        self,
        obs_dim: int,
        act_dim: int,
        cfg: AgentConfig,
        init_rng: np.random.Generator,
        policy_rng: np.random.Generator,
    ):
        self.cfg = cfg
        self.nets = init_sac_networks(obs_dim, act_dim, cfg, init_rng)
        self._optimizers = SacOptimizers.from_config(cfg)
        self._rng = policy_rng
        self.target_entropy = cfg.target_entropy_per_dim * act_dim
        self._log_alpha = np.array([math.log(cfg.alpha)]) if cfg.tune_alpha else None
        self._alpha_optimizer = make_optimizer(cfg.optimizer, cfg.alpha_lr)
        self.last_diagnostics: SacDiagnostics | None = None

    @property
    def alpha(self) -> float:
        """Temperature used by the next update."""
        if self._log_alpha is None:
            return self.cfg.alpha
        return float(np.exp(self._log_alpha[0]))

    def act(self, observation: np.ndarray, explore: bool = True) -> np.ndarray:
        head = policy_head(forward(self.nets.policy, observation))
        if not explore:
            return deterministic_action(head)
        return sample_squashed_gaussian(head, self._rng).action

    def update(self, batch: Batch) -> SacDiagnostics:
        self.nets, self.last_diagnostics = sac_update(
            batch, self.nets, self.cfg, self._optimizers, self._rng, alpha=self.alpha
        )
        if self._log_alpha is not None:
            _, grad = temperature_loss_and_grad(
                float(self._log_alpha[0]), self.last_diagnostics.mean_log_prob, self.target_entropy
            )
            (self._log_alpha,) = self._alpha_optimizer.step_arrays([self._log_alpha], [np.array([grad])])
        return self.last_diagnostics

    def networks(self) -> dict[str, MlpParams]:
        return self.nets.named()

    def load_networks(self, networks: dict[str, MlpParams]) -> None:
        self.nets = replace(self.nets, **networks)
