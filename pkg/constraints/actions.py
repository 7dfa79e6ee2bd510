"""
Explicit constraints (ECS): mapping unconstrained policy outputs onto the
feasible action set.

Raw layout, for U users:
    raw[0:4U]    per-user blocks (t_trans, b, f, p)
    raw[4U:5U]   per-user sampling skip k     (sampling-control only)
    raw[5U]      global local accuracy varpi  (sampling-control only)
"""

from dataclasses import dataclass

import numpy as np

from core.errors import DomainError, StructuralError
from wireless.models import NetworkConfig

PER_USER_FIELDS = 4
MIN_SHARE = 1e-6  # f and p lower bound as a fraction of their maxima
_LOGIT_CLIP = 1e-15


@dataclass(frozen=True)
class FeasibleAction:
    """A resource allocation that satisfies every explicit constraint."""
    t_trans: np.ndarray
    b: np.ndarray
    f: np.ndarray
    p: np.ndarray
    k: np.ndarray | None = None
    local_accuracy: float | None = None

    @property
    def num_users(self) -> int:
        return len(self.t_trans)


def action_dimension(num_users: int, sampling_control: bool) -> int:
    """Length of the raw action vector."""
    return PER_USER_FIELDS * num_users + ((num_users + 1) if sampling_control else 0)


def _layout(raw: np.ndarray, num_users: int) -> bool:
    """Validate the raw vector and report whether it carries (k, varpi)."""
    if raw.ndim != 1:
        raise StructuralError(f"raw action must be a vector, got shape {raw.shape}")
    if len(raw) == action_dimension(num_users, False):
        return False
    if len(raw) == action_dimension(num_users, True):
        return True
    raise StructuralError(
        f"raw action has length {len(raw)}; expected {action_dimension(num_users, False)} "
        f"or {action_dimension(num_users, True)} for U={num_users}"
    )


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    return np.exp(-np.logaddexp(0.0, -x))


def softmax(x: np.ndarray) -> np.ndarray:
    """Shift-invariant softmax."""
    z = np.exp(x - np.max(x))
    return z / np.sum(z)


def _bounded(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return lo + sigmoid(x) * (hi - lo)


def _logit(value: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if hi == lo:
        return np.zeros_like(np.asarray(value, dtype=float))
    unit = np.clip((np.asarray(value, dtype=float) - lo) / (hi - lo), _LOGIT_CLIP, 1.0 - _LOGIT_CLIP)
    return np.log(unit) - np.log1p(-unit)


def _check_varpi_range(varpi_range: tuple[float, float]) -> None:
    lo, hi = varpi_range
    if not 0 < lo <= hi < 1:
        raise DomainError(f"local accuracy range must satisfy 0 < lo <= hi < 1, got {varpi_range}")


def squash_action(
    raw: np.ndarray,
    cfg: NetworkConfig,
    varpi_range: tuple[float, float] = (0.05, 0.95),
) -> FeasibleAction:
    """
    Squash an unconstrained vector into a FeasibleAction.

    Bounded scalars go through a sigmoid and an affine rescale; bandwidth
    shares go through a softmax and are scaled by B, so sum(b) == B.
    """
    raw = np.asarray(raw, dtype=float)
    num_users = cfg.num_users
    sampling_control = _layout(raw, num_users)
    if not np.all(np.isfinite(raw)):
        raise DomainError("raw action contains non-finite entries")

    blocks = raw[: PER_USER_FIELDS * num_users].reshape(num_users, PER_USER_FIELDS)
    t_trans = _bounded(blocks[:, 0], 0.0, cfg.t_max_round)
    b = cfg.total_bandwidth * softmax(blocks[:, 1])
    f = _bounded(blocks[:, 2], MIN_SHARE * cfg.f_max, cfg.f_max)
    p = _bounded(blocks[:, 3], MIN_SHARE * cfg.p_max, cfg.p_max)

    k = None
    varpi = None
    if sampling_control:
        _check_varpi_range(varpi_range)
        tail = raw[PER_USER_FIELDS * num_users :]
        k = np.rint(_bounded(tail[:num_users], cfg.k_min, cfg.k_max))
        varpi = float(_bounded(tail[num_users], *varpi_range))

    return FeasibleAction(t_trans=t_trans, b=b, f=f, p=p, k=k, local_accuracy=varpi)


def unsquash_action(
    action: FeasibleAction,
    cfg: NetworkConfig,
    varpi_range: tuple[float, float] = (0.05, 0.95),
) -> np.ndarray:
    """
    Raw vector that squashes back onto the given action.

    Values sitting exactly on a bound map to a large finite logit.
    """
    blocks = np.empty((action.num_users, PER_USER_FIELDS))
    blocks[:, 0] = _logit(action.t_trans, 0.0, cfg.t_max_round)
    log_shares = np.log(np.clip(action.b / cfg.total_bandwidth, 1e-300, None))
    # softmax is shift-invariant; centred logits stay small
    blocks[:, 1] = log_shares - np.mean(log_shares)
    blocks[:, 2] = _logit(action.f, MIN_SHARE * cfg.f_max, cfg.f_max)
    blocks[:, 3] = _logit(action.p, MIN_SHARE * cfg.p_max, cfg.p_max)
    parts = [blocks.ravel()]
    if action.k is not None:
        varpi = action.local_accuracy if action.local_accuracy is not None else 0.5 * sum(varpi_range)
        parts.append(_logit(action.k, cfg.k_min, cfg.k_max))
        parts.append(np.atleast_1d(_logit(np.array(varpi), *varpi_range)))
    return np.concatenate(parts)


def clip_action(
    raw: np.ndarray,
    cfg: NetworkConfig,
    varpi_range: tuple[float, float] = (0.05, 0.95),
) -> tuple[FeasibleAction, float]:
    """
    Naive box mapping used by the unconstrained baseline.

    Each entry is clipped to [-1, 1] and mapped affinely onto its range;
    bandwidth is allotted per user on [0, B] independently. When the
    allotments exceed B they are scaled down proportionally.

    Returns:
        (action, bandwidth overflow as a fraction of B before projection)
    """
    raw = np.clip(np.asarray(raw, dtype=float), -1.0, 1.0)
    num_users = cfg.num_users
    sampling_control = _layout(raw, num_users)
    unit = (raw + 1.0) / 2.0

    blocks = unit[: PER_USER_FIELDS * num_users].reshape(num_users, PER_USER_FIELDS)
    t_trans = blocks[:, 0] * cfg.t_max_round
    b = blocks[:, 1] * cfg.total_bandwidth
    f = MIN_SHARE * cfg.f_max + blocks[:, 2] * (cfg.f_max - MIN_SHARE * cfg.f_max)
    p = MIN_SHARE * cfg.p_max + blocks[:, 3] * (cfg.p_max - MIN_SHARE * cfg.p_max)

    overflow = max(float(np.sum(b)) - cfg.total_bandwidth, 0.0) / cfg.total_bandwidth
    if overflow > 0:
        b = b * (cfg.total_bandwidth / np.sum(b))

    k = None
    varpi = None
    if sampling_control:
        _check_varpi_range(varpi_range)
        tail = unit[PER_USER_FIELDS * num_users :]
        k = np.rint(cfg.k_min + tail[:num_users] * (cfg.k_max - cfg.k_min))
        lo, hi = varpi_range
        varpi = float(lo + tail[num_users] * (hi - lo))

    return FeasibleAction(t_trans=t_trans, b=b, f=f, p=p, k=k, local_accuracy=varpi), overflow


def _box(value, lo: float, hi: float) -> np.ndarray:
    if hi == lo:
        return np.zeros_like(np.asarray(value, dtype=float))
    return 2.0 * (np.asarray(value, dtype=float) - lo) / (hi - lo) - 1.0


def unclip_action(
    action: FeasibleAction,
    cfg: NetworkConfig,
    varpi_range: tuple[float, float] = (0.05, 0.95),
) -> np.ndarray:
    """Box vector in [-1, 1] that clip_action maps back onto a feasible action."""
    blocks = np.empty((action.num_users, PER_USER_FIELDS))
    blocks[:, 0] = _box(action.t_trans, 0.0, cfg.t_max_round)
    blocks[:, 1] = _box(action.b, 0.0, cfg.total_bandwidth)
    blocks[:, 2] = _box(action.f, MIN_SHARE * cfg.f_max, cfg.f_max)
    blocks[:, 3] = _box(action.p, MIN_SHARE * cfg.p_max, cfg.p_max)
    parts = [blocks.ravel()]
    if action.k is not None:
        varpi = action.local_accuracy if action.local_accuracy is not None else 0.5 * sum(varpi_range)
        parts.append(_box(action.k, cfg.k_min, cfg.k_max))
        parts.append(np.atleast_1d(_box(varpi, *varpi_range)))
    return np.clip(np.concatenate(parts), -1.0, 1.0)


def sample_feasible_action(
    cfg: NetworkConfig,
    rng: np.random.Generator,
    sampling_control: bool,
    varpi_range: tuple[float, float] = (0.05, 0.95),
) -> FeasibleAction:
    """
    Draw an action uniformly from the feasible set.

    Bounded scalars are uniform on their ranges and bandwidth shares are
    uniform on the simplex.
    """
    n = cfg.num_users
    action = FeasibleAction(
        t_trans=rng.uniform(0.0, cfg.t_max_round, size=n),
        b=cfg.total_bandwidth * rng.dirichlet(np.ones(n)),
        f=rng.uniform(MIN_SHARE * cfg.f_max, cfg.f_max, size=n),
        p=rng.uniform(MIN_SHARE * cfg.p_max, cfg.p_max, size=n),
    )
    if not sampling_control:
        return action
    _check_varpi_range(varpi_range)
    return FeasibleAction(
        t_trans=action.t_trans,
        b=action.b,
        f=action.f,
        p=action.p,
        k=rng.integers(cfg.k_min, cfg.k_max + 1, size=n).astype(float),
        local_accuracy=float(rng.uniform(*varpi_range)),
    )


def constraint_violations(
    action: FeasibleAction,
    cfg: NetworkConfig,
    varpi_range: tuple[float, float] = (0.05, 0.95),
    rel_tol: float = 1e-6,
) -> list[str]:
    """List every explicit constraint the action breaks (empty when feasible)."""
    problems = []
    upper = 1.0 + rel_tol
    if np.any(action.f <= 0) or np.any(action.f > cfg.f_max * upper):
        problems.append("f outside (0, f_max]")
    if np.any(action.p <= 0) or np.any(action.p > cfg.p_max * upper):
        problems.append("p outside (0, p_max]")
    if np.any(action.b < 0):
        problems.append("negative bandwidth")
    if float(np.sum(action.b)) > cfg.total_bandwidth * upper:
        problems.append("sum(b) exceeds B")
    if np.any(action.t_trans < 0):
        problems.append("negative transmission time")
    if action.k is not None:
        if np.any(action.k < cfg.k_min) or np.any(action.k > cfg.k_max):
            problems.append("k outside [k_min, k_max]")
        if np.any(action.k != np.rint(action.k)):
            problems.append("k not integral")
    if action.local_accuracy is not None:
        lo, hi = varpi_range
        if not 0 < action.local_accuracy < 1 or not lo / upper <= action.local_accuracy <= hi * upper:
            problems.append("local accuracy outside its range")
    return problems
