"""
Squashed-Gaussian policy head.

The policy network emits 2n values: n means followed by n log-stds. Samples
are drawn by reparameterization, u = mean + std * noise, and squashed with
tanh so that every action lies in (-1, 1)^n.
"""

from dataclasses import dataclass, replace

import numpy as np

from core.errors import StructuralError

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG2 = np.log(2.0)


@dataclass(frozen=True)
class GaussianPolicyOutput:
    """
    Distribution parameters and, once sampled, the draw.

    Attributes:
        mean: Gaussian mean before squashing
        log_std: Log standard deviation, clamped to [LOG_STD_MIN, LOG_STD_MAX]
        clamped: True where the raw log-std hit a clamp (no gradient flows)
        noise: Standard-normal draw
        pre_squash: mean + std * noise
        action: tanh(pre_squash)
        log_prob: Log-density of the squashed action, summed over dimensions
    """
    mean: np.ndarray
    log_std: np.ndarray
    clamped: np.ndarray | None = None
    noise: np.ndarray | None = None
    pre_squash: np.ndarray | None = None
    action: np.ndarray | None = None
    log_prob: np.ndarray | float | None = None


def policy_head(raw: np.ndarray) -> GaussianPolicyOutput:
    """Split a (…, 2n) network output into mean and clamped log-std."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape[-1] % 2:
        raise StructuralError(f"policy output has odd width {raw.shape[-1]}")
    n = raw.shape[-1] // 2
    mean = raw[..., :n]
    raw_log_std = raw[..., n:]
    log_std = np.clip(raw_log_std, LOG_STD_MIN, LOG_STD_MAX)
    clamped = (raw_log_std < LOG_STD_MIN) | (raw_log_std > LOG_STD_MAX)
    return GaussianPolicyOutput(mean=mean, log_std=log_std, clamped=clamped)


def squashed_log_prob(mean, log_std, pre_squash) -> np.ndarray | float:
    """
    log pi(tanh(u)) for pre-squash u under Normal(mean, exp(log_std)^2).

    The tanh Jacobian uses log(1 - tanh(u)^2) = 2*(log 2 - u - softplus(-2u)).
    """
    u = np.asarray(pre_squash, dtype=float)
    log_std = np.asarray(log_std, dtype=float)
    eps = (u - np.asarray(mean, dtype=float)) / np.exp(log_std)
    gaussian = -0.5 * eps * eps - log_std - _HALF_LOG_2PI
    jacobian = 2.0 * (_LOG2 - u - np.logaddexp(0.0, -2.0 * u))
    total = np.sum(gaussian - jacobian, axis=-1)
    return float(total) if np.ndim(total) == 0 else total


def sample_squashed_gaussian(policy_out: GaussianPolicyOutput, rng: np.random.Generator) -> GaussianPolicyOutput:
    """
    Draw a = tanh(mean + std * noise) with its log-probability.

    Returns:
        policy_out with noise, pre_squash, action and log_prob filled in
    """
    noise = rng.standard_normal(np.shape(policy_out.mean))
    return squash_noise(policy_out, noise)


def squash_noise(policy_out: GaussianPolicyOutput, noise: np.ndarray) -> GaussianPolicyOutput:
    """Deterministic part of sampling for a given noise draw."""
    u = policy_out.mean + np.exp(policy_out.log_std) * noise
    return replace(
        policy_out,
        noise=noise,
        pre_squash=u,
        action=np.tanh(u),
        log_prob=squashed_log_prob(policy_out.mean, policy_out.log_std, u),
    )


def squashed_gaussian_backward(
    sample: GaussianPolicyOutput,
    grad_action,
    grad_log_prob,
) -> np.ndarray:
    """
    Gradient of a loss through a reparameterized sample.

    Args:
        sample: Output of sample_squashed_gaussian
        grad_action: dLoss/daction, shaped like the action
        grad_log_prob: dLoss/dlog_prob, one value per sample

    Returns:
        dLoss/d(raw head output), i.e. the (…, 2n) gradient to feed into the
        policy network's backward pass
    """
    a = sample.action
    grad_a = np.asarray(grad_action, dtype=float)
    grad_lp = np.asarray(grad_log_prob, dtype=float)[..., None]
    # d log_prob / du = 2a once the noise is held fixed
    grad_u = grad_a * (1.0 - a * a) + grad_lp * 2.0 * a
    grad_mean = grad_u
    grad_log_std = grad_u * np.exp(sample.log_std) * sample.noise - grad_lp
    if sample.clamped is not None:
        grad_log_std = np.where(sample.clamped, 0.0, grad_log_std)
    return np.concatenate([grad_mean, grad_log_std], axis=-1)


def deterministic_action(policy_out: GaussianPolicyOutput) -> np.ndarray:
    """Greedy action tanh(mean)."""
    return np.tanh(policy_out.mean)
