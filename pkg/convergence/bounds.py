"""
Generalization-gap model and analytic iteration bounds.

The information-usage bound is used as an equality model: the decayed
mutual information c0*exp(-c1*k*tau) is plugged straight into Psi.
"""

import math
from collections.abc import Sequence

import numpy as np

from convergence.params import GapParams, LearningParams
from core.errors import ConfigError, DivergentRegimeError, DomainError, StructuralError


def information_usage(c0: float, c1: float, k: float, tau: float) -> float:
    """
    Mutual information between ideally and actually sampled data.

    Args:
        c0: Entropy-difference constant [nats]
        c1: Time-variant coefficient [1/s]
        k: Sampling skip (samples skipped between two recorded samples)
        tau: Device minimum sampling interval [s]

    Returns:
        c0 * exp(-c1 * k * tau)
    """
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    return c0 * math.exp(-c1 * k * tau)


def local_gap_bound(gap: GapParams, u: int, k: float, tau: float) -> float:
    """
    Upper bound on user u's generalization gap.

    sqrt(2*sigma2/m_u) * sqrt(c0) * exp(-c1*k*tau/2)
    """
    if len(gap.m_u) > 1 and not 0 <= u < len(gap.m_u):
        raise StructuralError(f"user index {u} out of range for {len(gap.m_u)} sample counts")
    m_u = gap.sample_count(u)
    if m_u <= 0:
        raise DomainError(f"m_u must be positive, got {m_u} for user {u}")
    return math.sqrt(2.0 * gap.sigma2 / m_u) * math.sqrt(gap.c0) * math.exp(-gap.c1 * k * tau / 2.0)


def global_gap_bound(gap: GapParams, skips: Sequence[float], taus: Sequence[float]) -> float:
    """
    Global gap bound: the sum of the per-user bounds.

    Args:
        gap: Gap constants
        skips: k_u per user
        taus: tau_u per user
    """
    if len(skips) != len(taus):
        raise StructuralError(f"{len(skips)} skips but {len(taus)} sampling intervals")
    if len(skips) == 0:
        raise StructuralError("at least one user is required")
    return float(sum(local_gap_bound(gap, u, k, t) for u, (k, t) in enumerate(zip(skips, taus))))


def psi(gap: GapParams, k: float, tau: float) -> float:
    """
    Generalization gap statement 2^H_Z * sqrt(2 * (H_pz - I(k, tau))).

    Raises:
        DomainError: If the information usage exceeds H_pz
    """
    radicand = gap.H_pz - information_usage(gap.c0, gap.c1, k, tau)
    if radicand < 0:
        raise DomainError(
            f"H_pz ({gap.H_pz}) is below the information usage at k={k}, tau={tau}; Psi is undefined"
        )
    return (2.0 ** gap.H_Z) * math.sqrt(2.0 * radicand)


def local_iteration_bound(params: LearningParams, local_accuracy: float | None = None) -> float:
    """Real-valued 2/((2 - L*delta)*delta*mu) * log2(1/varpi)."""
    varpi = params.local_accuracy if local_accuracy is None else local_accuracy
    if not 0 < varpi < 1:
        raise DomainError(f"local accuracy must lie in (0, 1), got {varpi}")
    curvature = (2.0 - params.L * params.delta) * params.delta * params.mu
    if curvature <= 0:
        raise ConfigError(
            f"(2 - L*delta)*delta*mu = {curvature:.6g} is not positive "
            f"(L={params.L}, delta={params.delta}, mu={params.mu})",
            field="learning",
        )
    return 2.0 / curvature * math.log2(1.0 / varpi)


def local_iterations(params: LearningParams, local_accuracy: float | None = None) -> int:
    """
    Local iterations I_u needed for local accuracy varpi.

    Args:
        params: Learning constants
        local_accuracy: Overrides params.local_accuracy (an agent may choose it)

    Returns:
        Ceiling of the bound, at least 1
    """
    return max(1, math.ceil(local_iteration_bound(params, local_accuracy)))


def _contraction_rate(
    params: LearningParams,
    gap: GapParams,
    k: float,
    tau: float,
    num_users: int,
    local_accuracy: float | None,
) -> float:
    """[xi(L+2)Psi + xi*L/U - varpi*mu] / (2*U*L^2*xi); positive in the contractive regime."""
    if num_users < 1:
        raise DomainError(f"U must be at least 1, got {num_users}")
    varpi = params.local_accuracy if local_accuracy is None else local_accuracy
    L, xi = params.L, params.xi
    denominator = xi * (L + 2.0) * psi(gap, k, tau) + xi * L / num_users - varpi * params.mu
    if denominator <= 0:
        raise DivergentRegimeError(
            "divergent regime: xi(L+2)Psi + xi*L/U - varpi*mu is not positive",
            parameters={"xi": xi, "L": L, "U": num_users, "varpi": varpi, "mu": params.mu, "k": k, "tau": tau},
        )
    return denominator / (2.0 * num_users * L * L * xi)


def global_iteration_bound(
    params: LearningParams,
    gap: GapParams,
    k: float,
    tau: float,
    num_users: int,
    local_accuracy: float | None = None,
) -> float:
    """Real-valued global-iteration bound ln(1/varrho) / rate."""
    rate = _contraction_rate(params, gap, k, tau, num_users, local_accuracy)
    return math.log(1.0 / params.global_accuracy) / rate


def global_iterations(
    params: LearningParams,
    gap: GapParams,
    k: float,
    tau: float,
    num_users: int,
    local_accuracy: float | None = None,
) -> int:
    """
    Global rounds needed to reach global accuracy varrho.

    Returns:
        Ceiling of the bound; at least 1 unless varrho == 1 (already accurate)

    Raises:
        DivergentRegimeError: If the denominator is not positive
    """
    bound = global_iteration_bound(params, gap, k, tau, num_users, local_accuracy)
    if bound == 0:
        return 0
    return max(1, math.ceil(bound))


def contraction_factor(
    params: LearningParams,
    gap: GapParams,
    k: float,
    tau: float,
    num_users: int,
    local_accuracy: float | None = None,
) -> float:
    """
    Per-round multiplicative shrinkage of the loss gap.

    Raises:
        DivergentRegimeError: If the factor falls outside (0, 1)
    """
    factor = 1.0 - _contraction_rate(params, gap, k, tau, num_users, local_accuracy)
    if not 0 < factor < 1:
        raise DivergentRegimeError(
            f"contraction factor {factor:.6g} is outside (0, 1)",
            parameters={"L": params.L, "U": num_users, "k": k, "tau": tau},
        )
    return factor


def loss_gap_curve(
    params: LearningParams,
    gap: GapParams,
    k: float,
    tau: float,
    num_users: int,
    rounds: int,
    local_accuracy: float | None = None,
) -> np.ndarray:
    """Normalized loss gap after n = 0..rounds global rounds."""
    factor = contraction_factor(params, gap, k, tau, num_users, local_accuracy)
    return factor ** np.arange(rounds + 1, dtype=float)
