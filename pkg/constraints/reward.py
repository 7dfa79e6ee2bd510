"""
Ambiguous constraints (ACS) as reward penalties, and the per-step reward.
"""

from dataclasses import dataclass, field

import numpy as np

from constraints.actions import FeasibleAction
from convergence import LearningParams, local_iteration_bound
from core.errors import DomainError
from wireless.energy import achievable_rate, round_totals
from wireless.models import EnergyBreakdown, NetworkConfig, UserPopulation


@dataclass(frozen=True)
class RewardTerms:
    """
    Decomposed reward of one environment step.

    Attributes:
        energy_sum: Energy entering the reward [J]
        p1: Worst completion-time overflow [s]
        p2: Worst upload shortfall [bits]
        reward: Scalar reward
        p_bandwidth: Bandwidth overflow fraction (clip mapping only)
        energy: Cell-wide energy split, sampling included regardless of the reward mode
        round_time: Slowest user's completion time [s]
    """
    energy_sum: float
    p1: float
    p2: float
    reward: float
    p_bandwidth: float = 0.0
    energy: EnergyBreakdown = field(default_factory=EnergyBreakdown)
    round_time: float = 0.0


def penalty_time(
    action: FeasibleAction,
    users: UserPopulation,
    learning: LearningParams,
    cfg: NetworkConfig,
) -> float:
    """
    Completion-time overflow P1.

    max_u max(A_u*log2(1/varpi)/f_u + t_u - T_max, 0) with
    A_u = 2/((2 - L*delta)*delta*mu) * C_u * D_u. Uses the real-valued
    local-iteration bound so the penalty is continuous in f and varpi.
    """
    iters = local_iteration_bound(learning, action.local_accuracy)
    comp_time = iters * users.cycles_per_sample * users.num_samples / action.f
    overflow = comp_time + action.t_trans - cfg.t_max_round
    return float(max(np.max(overflow), 0.0))


def penalty_data(action: FeasibleAction, users: UserPopulation, cfg: NetworkConfig) -> float:
    """Upload shortfall P2: max_u max(D0 - t_u * r_u, 0)."""
    rate = achievable_rate(action.b, users.channel_gain, action.p, cfg.noise_psd)
    shortfall = cfg.model_size - action.t_trans * rate
    return float(max(np.max(shortfall), 0.0))


def default_data_penalty(cfg: NetworkConfig, margin: float = 2.0) -> float:
    """
    Data-penalty coefficient scaled to the cell [1/bit].

    -margin * U * p_max * T_max / D0: a full D0 shortfall costs more than
    every user transmitting at full power for the whole round. P2 is a max
    over users, so one failed upload lets the others skip for free.
    """
    if margin <= 1:
        raise DomainError(f"margin must exceed 1, got {margin}")
    return -margin * cfg.num_users * cfg.p_max * cfg.t_max_round / cfg.model_size


def step_reward(
    action: FeasibleAction,
    users: UserPopulation,
    cfg: NetworkConfig,
    learning: LearningParams,
    lambda_1: float,
    lambda_2: float,
    *,
    include_sampling: bool = False,
    bandwidth_overflow: float = 0.0,
    lambda_bandwidth: float = 0.0,
) -> RewardTerms:
    """
    Reward -sum(E_C + E_T) + lambda_1*P1 + lambda_2*P2.

    Args:
        action: Executed action
        users: Current user population
        cfg: Network configuration
        learning: Learning constants
        lambda_1: Time-penalty coefficient (<= 0)
        lambda_2: Data-penalty coefficient (<= 0)
        include_sampling: Also subtract sum(E_S)
        bandwidth_overflow: Overflow fraction reported by the clip mapping
        lambda_bandwidth: Its coefficient (<= 0)

    Raises:
        DomainError: If a coefficient is positive
    """
    for name, value in (("lambda_1", lambda_1), ("lambda_2", lambda_2), ("lambda_bandwidth", lambda_bandwidth)):
        if value > 0:
            raise DomainError(f"{name} must be <= 0 so that penalties lower the reward, got {value}")

    totals = round_totals(users, action, learning, cfg)
    energy = totals.energy.summed()
    energy_sum = energy.computation + energy.transmission
    if include_sampling:
        energy_sum += energy.sampling

    p1 = penalty_time(action, users, learning, cfg)
    p2 = penalty_data(action, users, cfg)
    reward = -energy_sum + lambda_1 * p1 + lambda_2 * p2 + lambda_bandwidth * bandwidth_overflow
    return RewardTerms(
        energy_sum=energy_sum,
        p1=p1,
        p2=p2,
        reward=float(reward),
        p_bandwidth=bandwidth_overflow,
        energy=energy,
        round_time=totals.round_time,
    )
