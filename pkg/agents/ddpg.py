"""
DDPG baseline: deterministic tanh actor, single critic, Gaussian exploration.
"""

from dataclasses import dataclass, replace

import numpy as np

from agents.config import AgentConfig
from agents.critic import critic_loss_and_grads, polyak_update, q_input
from agents.replay import Batch
from approximator import MlpParams, Adam, Sgd, backward, forward, forward_with_cache, init_mlp, make_optimizer

_ACTION_LIMIT = 1.0 - 1e-6


@dataclass(frozen=True)
class DdpgNetworks:
    actor: MlpParams
    critic: MlpParams
    target_actor: MlpParams
    target_critic: MlpParams

    def named(self) -> dict[str, MlpParams]:
        return {
            "actor": self.actor,
            "critic": self.critic,
            "target_actor": self.target_actor,
            "target_critic": self.target_critic,
        }


@dataclass(frozen=True)
class DdpgDiagnostics:
    critic_loss: float
    actor_loss: float


def init_ddpg_networks(obs_dim: int, act_dim: int, cfg: AgentConfig, rng: np.random.Generator) -> DdpgNetworks:
    hidden = list(cfg.hidden_sizes)
    actor = init_mlp([obs_dim, *hidden, act_dim], cfg.activation, rng)
    critic = init_mlp([obs_dim + act_dim, *hidden, 1], cfg.activation, rng)
    return DdpgNetworks(actor, critic, actor.copy(), critic.copy())


def ddpg_target(
    rewards: np.ndarray,
    next_states: np.ndarray,
    dones: np.ndarray,
    target_actor: MlpParams,
    target_critic: MlpParams,
    gamma: float,
) -> np.ndarray:
    """y = r + gamma*(1 - d)*Q_targ(s', tanh(mu_targ(s')))."""
    next_actions = np.tanh(forward(target_actor, next_states))
    q = forward(target_critic, q_input(next_states, next_actions))[:, 0]
    return rewards + gamma * (1.0 - dones) * q


def ddpg_actor_loss_and_grads(
    actor: MlpParams,
    critic: MlpParams,
    states: np.ndarray,
) -> tuple[float, MlpParams]:
    """Deterministic policy gradient of -mean Q(s, tanh(mu(s)))."""
    out, actor_cache = forward_with_cache(actor, states)
    actions = np.tanh(out)
    x = q_input(states, actions)
    q, critic_cache = forward_with_cache(critic, x)
    n = q.shape[0]
    loss = float(-np.mean(q))
    _, grad_x = backward(critic, x, np.full((n, 1), -1.0 / n), critic_cache)
    grad_out = grad_x[:, np.shape(states)[-1]:] * (1.0 - actions * actions)
    grads, _ = backward(actor, states, grad_out, actor_cache)
    return loss, grads


class DdpgAgent:
    """Stateful DDPG learner."""

    def __init__(
        self,
        obs_dim: int,
        act_dim: int,
        cfg: AgentConfig,
        init_rng: np.random.Generator,
        noise_rng: np.random.Generator,
    ):
        self.cfg = cfg
        self.nets = init_ddpg_networks(obs_dim, act_dim, cfg, init_rng)
        self._actor_opt: Sgd | Adam = make_optimizer(cfg.optimizer, cfg.actor_lr)
        self._critic_opt: Sgd | Adam = make_optimizer(cfg.optimizer, cfg.critic_lr)
        self._rng = noise_rng
        self.last_diagnostics: DdpgDiagnostics | None = None

    def act(self, observation: np.ndarray, explore: bool = True) -> np.ndarray:
        action = np.tanh(forward(self.nets.actor, observation))
        if explore and self.cfg.exploration_noise > 0:
            action = action + self._rng.normal(0.0, self.cfg.exploration_noise, size=action.shape)
        return np.clip(action, -_ACTION_LIMIT, _ACTION_LIMIT)

    def update(self, batch: Batch) -> DdpgDiagnostics:
        nets = self.nets
        targets = ddpg_target(
            batch.rewards, batch.next_states, batch.dones, nets.target_actor, nets.target_critic, self.cfg.gamma
        )
        critic_loss, critic_grads = critic_loss_and_grads(nets.critic, batch.states, batch.actions, targets)
        critic = self._critic_opt.step(nets.critic, critic_grads)

        actor_loss, actor_grads = ddpg_actor_loss_and_grads(nets.actor, critic, batch.states)
        actor = self._actor_opt.step(nets.actor, actor_grads)

        self.nets = DdpgNetworks(
            actor=actor,
            critic=critic,
            target_actor=polyak_update(nets.target_actor, actor, self.cfg.polyak),
            target_critic=polyak_update(nets.target_critic, critic, self.cfg.polyak),
        )
        self.last_diagnostics = DdpgDiagnostics(critic_loss=critic_loss, actor_loss=actor_loss)
        return self.last_diagnostics

    def networks(self) -> dict[str, MlpParams]:
        return self.nets.named()

    def load_networks(self, networks: dict[str, MlpParams]) -> None:
        self.nets = replace(self.nets, **networks)
