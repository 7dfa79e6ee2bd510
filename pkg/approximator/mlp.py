"""
Multilayer perceptrons with explicit forward and backward passes.

Layer i computes act_i(x @ W_i + b_i); the last layer is linear. Inputs may
be a single vector or a (batch, features) matrix. Gradients are those of a
scalar loss summed over the batch.
"""

from dataclasses import dataclass

import numpy as np

from core.errors import DomainError, StructuralError

ACTIVATIONS = ("softplus", "tanh", "relu", "identity")


@dataclass(frozen=True)
class MlpParams:
    """Weights (in, out) and biases (out,) per layer, plus hidden activations."""
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        if len(self.weights) == 0:
            raise StructuralError("an MLP needs at least one layer")
        if len(self.biases) != len(self.weights):
            raise StructuralError(f"{len(self.weights)} weight matrices but {len(self.biases)} bias vectors")
        if len(self.activations) != len(self.weights) - 1:
            raise StructuralError(
                f"{len(self.weights)} layers need {len(self.weights) - 1} hidden activations, "
                f"got {len(self.activations)}"
            )
        for name in self.activations:
            if name not in ACTIVATIONS:
                raise StructuralError(f"unknown activation '{name}'")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise StructuralError(f"layer {i}: weight {w.shape} and bias {b.shape} do not match")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise StructuralError(
                    f"layer {i} expects {w.shape[0]} inputs but layer {i - 1} produces {self.weights[i - 1].shape[1]}"
                )

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_size(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def layer_sizes(self) -> list[int]:
        """[in, hidden..., out]."""
        return [self.input_size] + [w.shape[1] for w in self.weights]

    def arrays(self) -> list[np.ndarray]:
        """Parameters in storage order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def with_arrays(self, arrays: list[np.ndarray]) -> "MlpParams":
        """New params of the same architecture from arrays in storage order."""
        if len(arrays) != 2 * len(self.weights):
            raise StructuralError(f"expected {2 * len(self.weights)} arrays, got {len(arrays)}")
        return MlpParams(
            weights=tuple(arrays[0::2]),
            biases=tuple(arrays[1::2]),
            activations=self.activations,
        )

    def copy(self) -> "MlpParams":
        return self.with_arrays([a.copy() for a in self.arrays()])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def init_mlp(sizes: list[int], activation: str, rng: np.random.Generator) -> MlpParams:
    """
    Xavier-uniform weights and zero biases.

    Args:
        sizes: [in, hidden..., out]
        activation: Activation for every hidden layer
        rng: Initialization stream
    """
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise StructuralError(f"invalid layer sizes {sizes}")
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(tuple(weights), tuple(biases), tuple([activation] * (len(sizes) - 2)))


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "softplus":
        return np.logaddexp(0.0, z)
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return z


def _activation_grad(name: str, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    if name == "softplus":
        return np.exp(-np.logaddexp(0.0, -z))
    if name == "tanh":
        return 1.0 - y * y
    if name == "relu":
        return (z > 0).astype(float)
    return np.ones_like(z)


def _as_batch(params: MlpParams, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != params.input_size:
        raise StructuralError(f"input shape {x.shape} does not match {params.input_size} input units")
    return batch, single


def forward_with_cache(params: MlpParams, x) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray, np.ndarray]]]:
    """
    Forward pass keeping (layer input, pre-activation, output) per layer.

    The cache is what backward() needs; outputs keep the input's rank.
    """
    h, single = _as_batch(params, x)
    cache = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w + b
        y = z if i == last else _activate(params.activations[i], z)
        cache.append((h, z, y))
        h = y
    return (h[0] if single else h), cache


def forward(params: MlpParams, x) -> np.ndarray:
    """Evaluate the network."""
    out, _ = forward_with_cache(params, x)
    return out


def backward(
    params: MlpParams,
    x,
    upstream,
    cache: list | None = None,
) -> tuple[MlpParams, np.ndarray]:
    """
    Reverse-mode gradients of a scalar loss.

    Args:
        params: Network
        x: Input used in the forward pass
        upstream: dLoss/dOutput, same shape as the output
        cache: forward_with_cache() result for x (recomputed when omitted)

    Returns:
        (parameter gradients shaped like params, dLoss/dInput)
    """
    if cache is None:
        _, cache = forward_with_cache(params, x)
    grad = np.asarray(upstream, dtype=float)
    single = grad.ndim == 1
    if single:
        grad = grad[None, :]
    if grad.shape != cache[-1][2].shape:
        raise StructuralError(f"upstream gradient {np.shape(upstream)} does not match output {cache[-1][2].shape}")

    grad_w = [None] * len(params.weights)
    grad_b = [None] * len(params.weights)
    last = len(params.weights) - 1
    for i in range(last, -1, -1):
        h, z, y = cache[i]
        if i != last:
            grad = grad * _activation_grad(params.activations[i], z, y)
        grad_w[i] = h.T @ grad
        grad_b[i] = grad.sum(axis=0)
        grad = grad @ params.weights[i].T

    grads = MlpParams(tuple(grad_w), tuple(grad_b), params.activations)
    return grads, (grad[0] if single else grad)


def check_finite(params: MlpParams) -> None:
    """Raise DomainError if any parameter is NaN or infinite."""
    if not params.is_finite():
        raise DomainError("network parameters contain non-finite values")
