import numpy as np
import pytest

from dubinsrl.errors import InputError
from dubinsrl.nn import (
    Mlp,
    adam_step,
    backward,
    finite_difference_grad,
    forward,
    init_adam,
    init_mlp,
    max_relative_error,
)


def test_init_shapes():
    net = init_mlp((14, 256, 256, 2), "tanh", seed=0)
    assert [w.shape for w in net.weights] == [(256, 14), (256, 256), (2, 256)]
    assert [b.shape for b in net.biases] == [(256,), (256,), (2,)]


def test_init_deterministic_in_seed():
    a = init_mlp((8, 16, 4), seed=3)
    b = init_mlp((8, 16, 4), seed=3)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)


def test_init_weights_within_fan_in_bound():
    net = init_mlp((14, 64, 64, 2), seed=1)
    for w, fan_in in zip(net.weights, (14, 64, 64)):
        bound = np.sqrt(6.0 / fan_in)
        assert np.all(np.abs(w) < bound)
    for b in net.biases:
        assert np.all(b == 0.0)


def test_init_rejects_bad_sizes():
    with pytest.raises(InputError):
        init_mlp((5,))
    with pytest.raises(InputError):
        init_mlp((5, 0, 2))


def test_identity_single_layer():
    net = init_mlp((3, 3), "linear", seed=0)
    net.weights[0][:] = np.eye(3)
    net.biases[0][:] = 0.0
    x = np.array([[1.0, -2.0, 0.5], [0.0, 3.0, -1.0]])
    y, _ = forward(net, x)
    assert np.array_equal(y, x)


def test_tanh_output_bounded():
    net = init_mlp((4, 32, 2), "tanh", seed=5)
    rng = np.random.default_rng(0)
    y, _ = forward(net, rng.normal(0, 1, size=(50, 4)))
    assert np.all(np.abs(y) < 1.0)
    # extreme pre-activations saturate to exactly +/-1 in float64, never beyond
    y, _ = forward(net, rng.normal(0, 100, size=(50, 4)))
    assert np.all(np.abs(y) <= 1.0)


def test_forward_matches_straight_line_oracle():
    net = init_mlp((5, 7, 6, 3), "tanh", seed=9)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(4, 5))
    # independent re-derivation with explicit matrix arithmetic
    h1 = np.maximum(x @ net.weights[0].T + net.biases[0], 0.0)
    h2 = np.maximum(h1 @ net.weights[1].T + net.biases[1], 0.0)
    expected = np.tanh(h2 @ net.weights[2].T + net.biases[2])
    y, _ = forward(net, x)
    assert np.max(np.abs(y - expected)) < 1e-12


def test_forward_width_mismatch():
    net = init_mlp((5, 4, 2), seed=0)
    with pytest.raises(InputError):
        forward(net, np.zeros((3, 6)))


def test_forward_batch_order_equivariant():
    net = init_mlp((6, 12, 3), "linear", seed=2)
    rng = np.random.default_rng(4)
    x = rng.normal(size=(10, 6))
    perm = rng.permutation(10)
    y, _ = forward(net, x)
    y_perm, _ = forward(net, x[perm])
    assert np.array_equal(y[perm], y_perm)


@pytest.mark.parametrize("activation", ["linear", "tanh"])
def test_backward_matches_finite_differences(activation):
    rng = np.random.default_rng(13)
    for trial in range(6):
        sizes = (int(rng.integers(2, 7)), int(rng.integers(3, 9)), int(rng.integers(1, 5)))
        net = init_mlp(sizes, activation, seed=int(rng.integers(1000)))
        x = rng.normal(size=(int(rng.integers(1, 5)), sizes[0]))
        g = rng.normal(size=(x.shape[0], sizes[-1]))
        _, cache = forward(net, x)
        analytic, _ = backward(net, cache, g)
        numeric = finite_difference_grad(net, x, lambda out: np.mean(np.sum(g * out, axis=1)))
        assert max_relative_error(analytic, numeric) < 1e-5


def test_backward_zero_gradient_gives_zero():
    net = init_mlp((4, 8, 2), "tanh", seed=0)
    x = np.ones((3, 4))
    _, cache = forward(net, x)
    grads, dx = backward(net, cache, np.zeros((3, 2)))
    assert all(np.all(w == 0.0) for w in grads.weights)
    assert np.all(dx == 0.0)


def test_backward_linear_scalar_input_gradient_is_weight():
    net = init_mlp((3, 1), "linear", seed=0)
    x = np.array([[1.0, 2.0, 3.0]])
    _, cache = forward(net, x)
    _, dx = backward(net, cache, np.array([[1.0]]))
    assert np.allclose(dx[0], net.weights[0][0])


def test_backward_input_gradient_matches_finite_differences():
    net = init_mlp((4, 6, 2), "tanh", seed=8)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 4))
    g = rng.normal(size=(3, 2))
    _, cache = forward(net, x)
    _, dx = backward(net, cache, g)
    h = 1e-6
    numeric = np.zeros_like(x)
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            up, down = x.copy(), x.copy()
            up[i, j] += h
            down[i, j] -= h
            yu, _ = forward(net, up)
            yd, _ = forward(net, down)
            numeric[i, j] = (np.mean(np.sum(g * yu, axis=1))
                             - np.mean(np.sum(g * yd, axis=1))) / (2 * h)
    assert np.max(np.abs(dx - numeric)) < 1e-7


def test_backward_rejects_foreign_cache():
    net = init_mlp((3, 2), seed=0)
    other = init_mlp((3, 2), seed=1)
    _, cache = forward(net, np.zeros((1, 3)))
    with pytest.raises(InputError):
        backward(other, cache, np.zeros((1, 2)))


# --- optimizer ------------------------------------------------------------

def test_adam_first_step_approximates_lr_times_sign():
    net = init_mlp((2, 2), seed=0)
    state = init_adam(net)
    before = net.weights[0].copy()
    grads_w = np.full_like(net.weights[0], 0.5)
    from dubinsrl.nn import GradientSet
    grads = GradientSet(weights=[grads_w], biases=[np.zeros_like(net.biases[0])])
    adam_step(net, grads, state, lr=0.01)
    # bias-corrected first step: -lr * g / (|g| + eps) ~ -lr * sign(g)
    delta = net.weights[0] - before
    assert np.allclose(delta, -0.01, atol=1e-6)
    assert state.t == 1


def test_adam_zero_gradient_keeps_parameters():
    net = init_mlp((3, 4, 2), seed=1)
    state = init_adam(net)
    snapshot = [w.copy() for w in net.weights]
    from dubinsrl.nn import zero_gradients
    adam_step(net, zero_gradients(net), state, lr=0.1)
    for w, snap in zip(net.weights, snapshot):
        assert np.array_equal(w, snap)
    assert state.t == 1


def test_adam_counter_increments():
    net = init_mlp((2, 2), seed=0)
    state = init_adam(net)
    from dubinsrl.nn import zero_gradients
    adam_step(net, zero_gradients(net), state, lr=0.0)
    adam_step(net, zero_gradients(net), state, lr=0.0)
    assert state.t == 2


def test_adam_lr_zero_advances_moments_only():
    net = init_mlp((2, 3, 1), seed=2)
    state = init_adam(net)
    snapshot = [w.copy() for w in net.weights]
    rng = np.random.default_rng(0)
    from dubinsrl.nn import GradientSet
    grads = GradientSet(
        weights=[rng.normal(size=w.shape) for w in net.weights],
        biases=[rng.normal(size=b.shape) for b in net.biases],
    )
    adam_step(net, grads, state, lr=0.0)
    for w, snap in zip(net.weights, snapshot):
        assert np.array_equal(w, snap)
    assert state.t == 1
    assert any(np.any(m != 0) for m in state.m_weights)


def test_adam_rejects_non_finite_gradients():
    net = init_mlp((2, 2), seed=0)
    state = init_adam(net)
    from dubinsrl.nn import GradientSet
    grads = GradientSet(weights=[np.full_like(net.weights[0], np.nan)],
                        biases=[np.zeros_like(net.biases[0])])
    with pytest.raises(InputError):
        adam_step(net, grads, state, lr=0.1)
    assert state.t == 0
    assert all(np.all(m == 0) for m in state.m_weights)


def test_finite_difference_constant_loss_zero_gradient():
    net = init_mlp((3, 4, 2), seed=0)
    grads = finite_difference_grad(net, np.ones((2, 3)), lambda out: 7.5)
    assert all(np.all(w == 0.0) for w in grads.weights)
