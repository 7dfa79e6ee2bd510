"""
Large-scale channel model: log-distance path loss plus log-normal shadowing.
"""

import numpy as np

from core.errors import DomainError
from wireless.models import NetworkConfig, UserPopulation

DEFAULT_PATHLOSS_A = 128.1
DEFAULT_PATHLOSS_B = 37.6


def path_loss_db(
    d: float | np.ndarray,
    pathloss_a: float = DEFAULT_PATHLOSS_A,
    pathloss_b: float = DEFAULT_PATHLOSS_B,
) -> float | np.ndarray:
    """
    Path loss in dB at distance d.

    Args:
        d: BS-user distance [km], scalar or array
        pathloss_a: Loss at 1 km [dB]
        pathloss_b: Loss per decade of distance [dB]

    Returns:
        pathloss_a + pathloss_b * log10(d)

    Raises:
        DomainError: If any distance is not positive
    """
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise DomainError(f"distance must be positive, got {d}")
    loss = pathloss_a + pathloss_b * np.log10(d_arr)
    return float(loss) if loss.ndim == 0 else loss


def draw_channel_gain(
    d: float | np.ndarray,
    shadow_sigma: float,
    rng: np.random.Generator,
    pathloss_a: float = DEFAULT_PATHLOSS_A,
    pathloss_b: float = DEFAULT_PATHLOSS_B,
) -> float | np.ndarray:
    """
    Draw linear power gains 10^(-(PL(d) + X)/10) with X ~ N(0, shadow_sigma^2).

    One shadowing sample is drawn per distance entry.
    """
    if shadow_sigma < 0:
        raise DomainError(f"shadow_sigma must be non-negative, got {shadow_sigma}")
    loss = np.asarray(path_loss_db(d, pathloss_a, pathloss_b), dtype=float)
    shadow = rng.normal(0.0, shadow_sigma, size=loss.shape) if shadow_sigma > 0 else np.zeros(loss.shape)
    gain = 10.0 ** (-(loss + shadow) / 10.0)
    return float(gain) if gain.ndim == 0 else gain


def draw_user_distances(
    num_users: int,
    cell_radius: float,
    rng: np.random.Generator,
    min_distance: float = 0.0,
) -> np.ndarray:
    """
    Drop users uniformly over the disk (area-uniform radius).

    Radii are r = R * sqrt(V) with V uniform on [(r_min/R)^2, 1], which keeps
    every user at least min_distance away from the BS.
    """
    low = (min_distance / cell_radius) ** 2
    v = rng.uniform(low, 1.0, size=num_users)
    return cell_radius * np.sqrt(v)


def draw_population(cfg: NetworkConfig, rng: np.random.Generator) -> UserPopulation:
    """
    Draw a fresh cell: positions, CPU constants and initial gains.

    C_u is continuous uniform over the configured range; D_u is the same for
    every user.
    """
    distance = draw_user_distances(cfg.num_users, cfg.cell_radius, rng, cfg.min_distance)
    lo, hi = cfg.cycles_per_sample
    cycles = rng.uniform(lo, hi, size=cfg.num_users)
    gains = draw_channel_gain(distance, cfg.shadow_sigma, rng, cfg.pathloss_a, cfg.pathloss_b)
    return UserPopulation(
        distance=distance,
        channel_gain=np.atleast_1d(gains),
        cycles_per_sample=cycles,
        num_samples=np.full(cfg.num_users, float(cfg.num_samples)),
    )


def redraw_gains(population: UserPopulation, cfg: NetworkConfig, rng: np.random.Generator) -> UserPopulation:
    """Fresh shadowing for the same user positions."""
    gains = draw_channel_gain(population.distance, cfg.shadow_sigma, rng, cfg.pathloss_a, cfg.pathloss_b)
    return population.with_gains(np.atleast_1d(gains))
