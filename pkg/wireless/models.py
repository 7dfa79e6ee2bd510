"""
Network configuration and per-user state.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.errors import DomainError, StructuralError

BITS_PER_MEGABYTE = 8.0e6


def noise_psd_w_per_hz(dbm_per_hz: float) -> float:
    """Convert a noise density from dBm/Hz to W/Hz."""
    return 10.0 ** ((dbm_per_hz - 30.0) / 10.0)


class NetworkConfig(BaseModel):
    """
    Static network parameters.

    Units are SI except where the field name says otherwise; dBm/Hz noise and
    megabyte payloads are converted once through the properties below.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_users: int = Field(100, ge=1)
    total_bandwidth: float = Field(20e6, gt=0, description="B [Hz]")
    noise_psd_dbm_hz: float = Field(-174.0, description="n0 [dBm/Hz]")
    cell_radius: float = Field(1.0, gt=0, description="[km]")
    min_distance: float = Field(0.01, gt=0, description="closest user drop [km]")
    shadow_sigma: float = Field(8.0, ge=0, description="[dB]")
    pathloss_a: float = 128.1
    pathloss_b: float = 37.6
    model_size_mb: float = Field(28.0, gt=0, description="D0 [MB]")
    t_max_round: float = Field(20.0, gt=0, description="[s]")
    f_max: float = Field(2e9, gt=0, description="[Hz]")
    p_max: float = Field(10.0, gt=0, description="[W]")
    k_min: int = Field(0, ge=0)
    k_max: int = Field(100, ge=0)
    k_fixed: int = Field(0, ge=0, description="skip used when k is not an action")
    kappa: float = Field(1e-28, gt=0)
    sample_power: float = Field(0.01, ge=0, description="P_u [J/sample]")
    tau: float = Field(0.01, gt=0, description="tau_u [s]")
    cycles_per_sample: tuple[float, float] = (1e4, 3e4)
    num_samples: int = Field(500, ge=1, description="D_u")

    @model_validator(mode="after")
    def _check_ranges(self) -> "NetworkConfig":
        if self.k_min > self.k_max:
            raise ValueError(f"k_min ({self.k_min}) must not exceed k_max ({self.k_max})")
        if not self.k_min <= self.k_fixed <= self.k_max:
            raise ValueError(f"k_fixed ({self.k_fixed}) must lie in [k_min, k_max]")
        lo, hi = self.cycles_per_sample
        if not 0 < lo <= hi:
            raise ValueError("cycles_per_sample must satisfy 0 < low <= high")
        if self.min_distance > self.cell_radius:
            raise ValueError("min_distance must not exceed cell_radius")
        return self

    @property
    def noise_psd(self) -> float:
        """Noise power spectral density n0 in W/Hz."""
        return noise_psd_w_per_hz(self.noise_psd_dbm_hz)

    @property
    def model_size(self) -> float:
        """Upload payload D0 in bits."""
        return self.model_size_mb * BITS_PER_MEGABYTE


@dataclass(frozen=True)
class UserState:
    """One user's dynamic state."""
    distance: float
    channel_gain: float
    cycles_per_sample: float
    num_samples: int


@dataclass(frozen=True)
class UserPopulation:
    """
    All users of a cell stored column-wise.

    Every array has length U; index u is user u.
    """
    distance: np.ndarray
    channel_gain: np.ndarray
    cycles_per_sample: np.ndarray
    num_samples: np.ndarray

    def __post_init__(self):
        n = len(self.distance)
        for name in ("channel_gain", "cycles_per_sample", "num_samples"):
            if len(getattr(self, name)) != n:
                raise StructuralError(f"UserPopulation.{name} has length {len(getattr(self, name))}, expected {n}")
        if np.any(self.channel_gain <= 0):
            raise DomainError("channel gains must be positive")
        if np.any(self.cycles_per_sample <= 0):
            raise DomainError("cycles_per_sample must be positive")
        if np.any(self.num_samples < 1):
            raise DomainError("num_samples must be at least 1")

    @property
    def size(self) -> int:
        """Number of users U."""
        return len(self.distance)

    def with_gains(self, channel_gain: np.ndarray) -> "UserPopulation":
        """Copy with new channel gains (users do not move within an episode)."""
        return UserPopulation(
            distance=self.distance,
            channel_gain=np.asarray(channel_gain, dtype=float),
            cycles_per_sample=self.cycles_per_sample,
            num_samples=self.num_samples,
        )

    def users(self) -> list[UserState]:
        """Row view as individual UserState values."""
        return [
            UserState(
                distance=float(d),
                channel_gain=float(g),
                cycles_per_sample=float(c),
                num_samples=int(n),
            )
            for d, g, c, n in zip(self.distance, self.channel_gain, self.cycles_per_sample, self.num_samples)
        ]

    @classmethod
    def from_users(cls, users: list[UserState]) -> "UserPopulation":
        """Stack individual users into a population."""
        return cls(
            distance=np.array([u.distance for u in users], dtype=float),
            channel_gain=np.array([u.channel_gain for u in users], dtype=float),
            cycles_per_sample=np.array([u.cycles_per_sample for u in users], dtype=float),
            num_samples=np.array([u.num_samples for u in users], dtype=float),
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    """Sampling, computation and transmission energy [J]; scalars or per-user arrays."""
    sampling: float | np.ndarray = 0.0
    computation: float | np.ndarray = 0.0
    transmission: float | np.ndarray = 0.0

    @property
    def total(self) -> float | np.ndarray:
        """E_S + E_C + E_T."""
        return self.sampling + self.computation + self.transmission

    def summed(self) -> "EnergyBreakdown":
        """Aggregate per-user arrays into a cell-wide breakdown."""
        return EnergyBreakdown(
            sampling=float(np.sum(self.sampling)),
            computation=float(np.sum(self.computation)),
            transmission=float(np.sum(self.transmission)),
        )


@dataclass(frozen=True)
class RoundTotals:
    """Per-user result of one FL communication round."""
    energy: EnergyBreakdown
    completion_time: np.ndarray
    local_iterations: int = 0

    @property
    def round_time(self) -> float:
        """Synchronous round duration: the slowest user."""
        return float(np.max(self.completion_time))
