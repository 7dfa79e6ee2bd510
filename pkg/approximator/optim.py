"""
First-order parameter updaters.
"""

from dataclasses import dataclass, field

import numpy as np

from approximator.mlp import MlpParams
from core.errors import StructuralError


def _check_shapes(params: MlpParams, grads: MlpParams) -> None:
    for p, g in zip(params.arrays(), grads.arrays(), strict=True):
        if p.shape != g.shape:
            raise StructuralError(f"gradient shape {g.shape} does not match parameter shape {p.shape}")


def apply_gradients(params: MlpParams, grads: MlpParams, learn_rate: float) -> MlpParams:
    """Plain gradient descent: params - learn_rate * grads."""
    _check_shapes(params, grads)
    return params.with_arrays([p - learn_rate * g for p, g in zip(params.arrays(), grads.arrays())])


class Sgd:
    """Stateless wrapper around apply_gradients."""

    def __init__(self, learn_rate: float):
        self.learn_rate = learn_rate

    def step(self, params: MlpParams, grads: MlpParams) -> MlpParams:
        return apply_gradients(params, grads, self.learn_rate)

    def step_arrays(self, arrays: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        return [p - self.learn_rate * g for p, g in zip(arrays, grads, strict=True)]


@dataclass
class Adam:
    """
    Adam with bias correction.

    One instance per network; moment buffers are created on the first step.
    """
    learn_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _m: list[np.ndarray] = field(default_factory=list, repr=False)
    _v: list[np.ndarray] = field(default_factory=list, repr=False)
    _t: int = 0

    def step(self, params: MlpParams, grads: MlpParams) -> MlpParams:
        _check_shapes(params, grads)
        return params.with_arrays(self.step_arrays(params.arrays(), grads.arrays()))

    def step_arrays(self, arrays: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        """Update a plain list of arrays; the list layout must not change between calls."""
        if not self._m:
            self._m = [np.zeros_like(p) for p in arrays]
            self._v = [np.zeros_like(p) for p in arrays]
        self._t += 1
        c1 = 1.0 - self.beta1 ** self._t
        c2 = 1.0 - self.beta2 ** self._t

        updated = []
        for i, (p, g) in enumerate(zip(arrays, grads, strict=True)):
            self._m[i] = self.beta1 * self._m[i] + (1.0 - self.beta1) * g
            self._v[i] = self.beta2 * self._v[i] + (1.0 - self.beta2) * g * g
            step = self.learn_rate * (self._m[i] / c1) / (np.sqrt(self._v[i] / c2) + self.eps)
            updated.append(p - step)
        return updated


def make_optimizer(kind: str, learn_rate: float) -> Sgd | Adam:
    """Build the updater named in AgentConfig.optimizer."""
    if kind == "sgd":
        return Sgd(learn_rate)
    if kind == "adam":
        return Adam(learn_rate)
    raise ValueError(f"unknown optimizer '{kind}'")
