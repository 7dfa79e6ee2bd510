"""
Per-user rate, energy and time models for one FL communication round.
"""

from typing import TYPE_CHECKING

import numpy as np

from convergence import LearningParams, local_iterations
from core.errors import DomainError, StructuralError
from wireless.models import EnergyBreakdown, NetworkConfig, RoundTotals, UserPopulation

if TYPE_CHECKING:
    from constraints.actions import FeasibleAction

_LN2 = np.log(2.0)


def achievable_rate(b_u, g_u, p_u, n0: float):
    """
    Shannon rate b * log2(1 + g*p / (n0*b)) in bits/s.

    A zero bandwidth share yields rate 0 (the b -> 0 limit) instead of an error.
    Accepts scalars or equal-length arrays.
    """
    b = np.asarray(b_u, dtype=float)
    g = np.asarray(g_u, dtype=float)
    p = np.asarray(p_u, dtype=float)
    if np.any(b < 0) or np.any(p < 0):
        raise DomainError("bandwidth and power must be non-negative")
    safe_b = np.where(b > 0, b, 1.0)
    snr = g * p / (n0 * safe_b)
    rate = np.where(b > 0, b * np.log1p(snr) / _LN2, 0.0)
    return float(rate) if rate.ndim == 0 else rate


def sampling_energy(k_u, sample_power: float):
    """E_S = k_u * P_u."""
    k = np.asarray(k_u, dtype=float)
    if np.any(k < 0):
        raise DomainError(f"k must be non-negative, got {k_u}")
    energy = k * sample_power
    return float(energy) if energy.ndim == 0 else energy


def local_computation(local_iters, cycles_per_sample, num_samples, f_u, kappa: float):
    """
    Local training time and energy.

    Returns:
        (I*C*D/f seconds, kappa*I*C*D*f^2 joules)
    """
    f = np.asarray(f_u, dtype=float)
    if np.any(f <= 0):
        raise DomainError(f"CPU frequency must be positive, got {f_u}")
    work = np.asarray(local_iters, dtype=float) * np.asarray(cycles_per_sample, dtype=float) * np.asarray(
        num_samples, dtype=float
    )
    time = work / f
    energy = kappa * work * f ** 2
    if time.ndim == 0:
        return float(time), float(energy)
    return time, energy


def transmission_energy(p_u, t_trans):
    """E_T = p_u * t_trans."""
    p = np.asarray(p_u, dtype=float)
    t = np.asarray(t_trans, dtype=float)
    if np.any(p < 0) or np.any(t < 0):
        raise DomainError("power and transmission time must be non-negative")
    energy = p * t
    return float(energy) if energy.ndim == 0 else energy


def round_totals(
    users: UserPopulation,
    action: "FeasibleAction",
    learning: LearningParams,
    cfg: NetworkConfig,
) -> RoundTotals:
    """
    Energy and completion time of every user for one round.

    I_u comes from the local-accuracy bound at the action's varpi (or the
    configured one); k falls back to cfg.k_fixed when the action has none.
    """
    if action.num_users != users.size:
        raise StructuralError(f"action covers {action.num_users} users, population has {users.size}")

    iters = local_iterations(learning, action.local_accuracy)
    comp_time, comp_energy = local_computation(
        iters, users.cycles_per_sample, users.num_samples, action.f, cfg.kappa
    )
    skips = action.k if action.k is not None else np.full(users.size, float(cfg.k_fixed))
    energy = EnergyBreakdown(
        sampling=sampling_energy(skips, cfg.sample_power),
        computation=comp_energy,
        transmission=transmission_energy(action.p, action.t_trans),
    )
    return RoundTotals(
        energy=energy,
        completion_time=comp_time + action.t_trans,
        local_iterations=iters,
    )


def campaign_totals(totals: RoundTotals, global_rounds: int) -> tuple[EnergyBreakdown, np.ndarray]:
    """
    Whole-campaign energy and per-user completion time.

    Repeats one round's figures I_glob times.
    """
    summed = totals.energy.summed()
    energy = EnergyBreakdown(
        sampling=global_rounds * summed.sampling,
        computation=global_rounds * summed.computation,
        transmission=global_rounds * summed.transmission,
    )
    return energy, global_rounds * totals.completion_time
