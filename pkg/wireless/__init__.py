"""
Physical-layer and device-level models.
"""

from .models import (
    NetworkConfig,
    UserState,
    UserPopulation,
    EnergyBreakdown,
    RoundTotals,
    noise_psd_w_per_hz,
)
from .channel import (
    path_loss_db,
    draw_channel_gain,
    draw_user_distances,
    draw_population,
    redraw_gains,
)
from .energy import (
    achievable_rate,
    sampling_energy,
    local_computation,
    transmission_energy,
    round_totals,
    campaign_totals,
)

__all__ = [
    "NetworkConfig",
    "UserState",
    "UserPopulation",
    "EnergyBreakdown",
    "RoundTotals",
    "noise_psd_w_per_hz",
    "path_loss_db",
    "draw_channel_gain",
    "draw_user_distances",
    "draw_population",
    "redraw_gains",
    "achievable_rate",
    "sampling_energy",
    "local_computation",
    "transmission_energy",
    "round_totals",
    "campaign_totals",
]
