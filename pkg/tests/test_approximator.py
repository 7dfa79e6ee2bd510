"""
MLP forward/backward, squashed-Gaussian head and optimizers.
"""

import math

import numpy as np
import pytest

from approximator import (
    LOG_STD_MAX,
    Adam,
    MlpParams,
    Sgd,
    apply_gradients,
    backward,
    check_finite,
    deterministic_action,
    forward,
    init_mlp,
    make_optimizer,
    policy_head,
    sample_squashed_gaussian,
    squash_noise,
    squashed_gaussian_backward,
    squashed_log_prob,
)
from core.errors import DomainError, StructuralError

H = 1e-5


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12))


def numeric_param_grads(params: MlpParams, loss) -> list[np.ndarray]:
    """Central differences of loss(params) for every parameter entry."""
    arrays = [a.copy() for a in params.arrays()]
    grads = []
    for i, arr in enumerate(arrays):
        grad = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            saved = arr[idx]
            arr[idx] = saved + H
            up = loss(params.with_arrays(arrays))
            arr[idx] = saved - H
            down = loss(params.with_arrays(arrays))
            arr[idx] = saved
            grad[idx] = (up - down) / (2 * H)
        grads.append(grad)
    return grads


def manual_forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    acts = {"softplus": lambda z: np.log1p(np.exp(z)), "tanh": np.tanh, "relu": lambda z: np.maximum(z, 0)}
    h = x
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w + b
        h = z if i == len(params.weights) - 1 else acts[params.activations[i]](z)
    return h


class TestMlp:
    @pytest.mark.parametrize("activation", ["softplus", "tanh", "relu"])
    def test_forward_matches_manual_evaluation(self, activation):
        rng = np.random.default_rng(0)
        params = init_mlp([4, 6, 5, 3], activation, rng)
        x = rng.normal(size=(7, 4))
        np.testing.assert_allclose(forward(params, x), manual_forward(params, x), rtol=1e-12, atol=1e-12)

    def test_vector_input_keeps_rank(self):
        params = init_mlp([3, 4, 2], "tanh", np.random.default_rng(1))
        assert forward(params, np.zeros(3)).shape == (2,)
        assert forward(params, np.zeros((5, 3))).shape == (5, 2)

    def test_layer_sizes(self):
        params = init_mlp([3, 8, 8, 1], "softplus", np.random.default_rng(2))
        assert params.layer_sizes == [3, 8, 8, 1]
        assert params.input_size == 3
        assert params.output_size == 1

    def test_wrong_input_width(self):
        params = init_mlp([3, 4, 2], "tanh", np.random.default_rng(1))
        with pytest.raises(StructuralError):
            forward(params, np.zeros(4))

    def test_invalid_architectures(self):
        with pytest.raises(StructuralError):
            init_mlp([3], "tanh", np.random.default_rng(0))
        with pytest.raises(StructuralError):
            MlpParams((np.zeros((2, 3)), np.zeros((4, 1))), (np.zeros(3), np.zeros(1)), ("tanh",))
        with pytest.raises(StructuralError):
            init_mlp([2, 2, 2], "sigmoid", np.random.default_rng(0))

    @pytest.mark.parametrize("seed", range(20))
    def test_parameter_gradients_match_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        activation = ("softplus", "tanh")[seed % 2]
        params = init_mlp([3, 5, 4, 2], activation, rng)
        x = rng.normal(size=(6, 3))
        upstream = rng.normal(size=(6, 2))

        def loss(p):
            return float(np.sum(forward(p, x) * upstream))

        grads, _ = backward(params, x, upstream)
        for analytic, numeric in zip(grads.arrays(), numeric_param_grads(params, loss)):
            assert relative_error(analytic, numeric) <= 1e-4

    def test_input_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        params = init_mlp([4, 6, 3], "softplus", rng)
        x = rng.normal(size=4)
        upstream = rng.normal(size=3)
        _, grad_x = backward(params, x, upstream)
        numeric = np.zeros(4)
        for i in range(4):
            step = np.zeros(4)
            step[i] = H
            numeric[i] = (np.dot(forward(params, x + step), upstream) - np.dot(forward(params, x - step), upstream)) / (2 * H)
        assert relative_error(grad_x, numeric) <= 1e-4

    def test_upstream_shape_checked(self):
        params = init_mlp([3, 4, 2], "tanh", np.random.default_rng(1))
        with pytest.raises(StructuralError):
            backward(params, np.zeros((2, 3)), np.zeros((2, 3)))

    def test_check_finite(self):
        params = init_mlp([2, 2, 1], "tanh", np.random.default_rng(0))
        check_finite(params)
        arrays = params.arrays()
        arrays[0] = arrays[0].copy()
        arrays[0][0, 0] = np.inf
        with pytest.raises(DomainError):
            check_finite(params.with_arrays(arrays))


class TestSquashedGaussian:
    def test_head_splits_and_clamps(self):
        head = policy_head(np.array([0.1, -0.2, 5.0, -30.0]))
        np.testing.assert_allclose(head.mean, [0.1, -0.2])
        np.testing.assert_allclose(head.log_std, [LOG_STD_MAX, -20.0])
        np.testing.assert_array_equal(head.clamped, [True, True])

    def test_odd_width_rejected(self):
        with pytest.raises(StructuralError):
            policy_head(np.zeros(3))

    def test_log_prob_matches_density(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            mean = rng.normal(size=3)
            log_std = rng.uniform(-2, 0, size=3)
            u = rng.normal(mean, np.exp(log_std))
            expected = 0.0
            for m, s, x in zip(mean, np.exp(log_std), u):
                normal = -0.5 * ((x - m) / s) ** 2 - math.log(s) - 0.5 * math.log(2 * math.pi)
                expected += normal - math.log(1 - math.tanh(x) ** 2)
            assert squashed_log_prob(mean, log_std, u) == pytest.approx(expected, rel=1e-8, abs=1e-8)

    def test_samples_are_squashed_gaussians(self):
        rng = np.random.default_rng(5)
        head = policy_head(np.tile([0.3, -0.5, 0.0, -1.0], (1000, 1)))
        sample = sample_squashed_gaussian(head, rng)
        assert np.all(np.abs(sample.action) < 1)
        standardized = (sample.pre_squash - head.mean) / np.exp(head.log_std)
        assert abs(np.mean(standardized)) < 0.1
        assert np.std(standardized) == pytest.approx(1.0, abs=0.1)
        assert sample.log_prob.shape == (1000,)

    def test_deterministic_action(self):
        head = policy_head(np.array([0.7, 0.0]))
        assert deterministic_action(head) == pytest.approx(np.tanh([0.7]))

    @pytest.mark.parametrize("seed", range(20))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        raw = np.concatenate([rng.normal(size=(4, 3)), rng.uniform(-1.5, 0.5, size=(4, 3))], axis=1)
        noise = rng.normal(size=(4, 3))
        weights = rng.normal(size=(4, 3))
        coeff = rng.normal(size=4)

        def loss(r):
            s = squash_noise(policy_head(r), noise)
            return float(np.sum(weights * s.action) + np.sum(coeff * s.log_prob))

        sample = squash_noise(policy_head(raw), noise)
        analytic = squashed_gaussian_backward(sample, weights, coeff)
        numeric = np.zeros_like(raw)
        for idx in np.ndindex(raw.shape):
            up, down = raw.copy(), raw.copy()
            up[idx] += H
            down[idx] -= H
            numeric[idx] = (loss(up) - loss(down)) / (2 * H)
        assert relative_error(analytic, numeric) <= 1e-4

    def test_no_gradient_through_clamped_log_std(self):
        raw = np.array([0.2, 3.0])
        sample = squash_noise(policy_head(raw), np.array([0.5]))
        grad = squashed_gaussian_backward(sample, np.array([1.0]), 1.0)
        assert grad[1] == 0.0
        assert grad[0] != 0.0


class TestOptimizers:
    @pytest.fixture
    def params(self):
        return init_mlp([2, 3, 1], "tanh", np.random.default_rng(6))

    def test_sgd_step(self, params):
        grads = params.with_arrays([np.ones_like(a) for a in params.arrays()])
        updated = Sgd(0.1).step(params, grads)
        for new, old in zip(updated.arrays(), params.arrays()):
            np.testing.assert_allclose(new, old - 0.1)

    def test_apply_gradients_shape_mismatch(self, params):
        other = init_mlp([2, 4, 1], "tanh", np.random.default_rng(0))
        with pytest.raises(StructuralError):
            apply_gradients(params, other, 0.1)

    def test_adam_first_step_is_sign_scaled(self, params):
        rng = np.random.default_rng(7)
        grads = params.with_arrays([rng.normal(size=a.shape) for a in params.arrays()])
        updated = Adam(0.01).step(params, grads)
        for new, old, g in zip(updated.arrays(), params.arrays(), grads.arrays()):
            np.testing.assert_allclose(old - new, 0.01 * np.sign(g), rtol=1e-3)

    def test_adam_minimizes_quadratic(self, params):
        opt = Adam(0.05)
        current = params
        for _ in range(500):
            current = opt.step(current, current)  # gradient of 0.5*|theta|^2
        norm = lambda p: np.sqrt(sum(np.sum(a * a) for a in p.arrays()))
        assert norm(current) < 0.25 * norm(params)

    def test_make_optimizer(self):
        assert isinstance(make_optimizer("sgd", 0.1), Sgd)
        assert isinstance(make_optimizer("adam", 0.1), Adam)
        with pytest.raises(ValueError):
            make_optimizer("rmsprop", 0.1)
