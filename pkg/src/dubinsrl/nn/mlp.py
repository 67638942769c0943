"""Dense multilayer perceptron with a hand-written forward/backward pass.

All arithmetic is float64. Hidden layers use the rectifier; the output
layer is either linear (value heads) or tanh (bounded action heads).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

OUTPUT_ACTIVATIONS = ("linear", "tanh")


@dataclass
class Mlp:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]       # weights[k] has shape (sizes[k+1], sizes[k])
    biases: list[np.ndarray]        # biases[k] has shape (sizes[k+1],)
    output_activation: str = "linear"

    def copy(self) -> "Mlp":
        return Mlp(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            output_activation=self.output_activation,
        )

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


@dataclass
class GradientSet:
    """Per-parameter gradients, shape-congruent with an Mlp."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def is_finite(self) -> bool:
        return (all(np.all(np.isfinite(w)) for w in self.weights)
                and all(np.all(np.isfinite(b)) for b in self.biases))


@dataclass
class ForwardCache:
    """Intermediate values kept for the backward pass."""

    net_id: int
    inputs: list[np.ndarray]            # activation entering each layer
    pre_activations: list[np.ndarray]   # z = x W^T + b per layer
    output: np.ndarray


def init_mlp(layer_sizes, output_activation: str = "linear", seed: int = 0) -> Mlp:
    """Uniform +/-sqrt(6/fan_in) weights (rectifier scaling), zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s <= 0 for s in sizes):
        raise InputError(f"need at least two positive layer sizes, got {sizes}")
    if output_activation not in OUTPUT_ACTIVATIONS:
        raise InputError(f"unknown output activation {output_activation!r}")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(layer_sizes=sizes, weights=weights, biases=biases,
               output_activation=output_activation)


def _as_batch(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def forward(net: Mlp, x) -> tuple[np.ndarray, ForwardCache]:
    """Affine-then-activation composition over the batch.

    Accepts a single input vector or a (batch, input_dim) matrix; the output
    keeps the same batch arrangement.
    """
    batch, squeeze = _as_batch(x)
    if batch.shape[1] != net.input_dim:
        raise InputError(f"input width {batch.shape[1]} != expected {net.input_dim}")
    inputs = []
    pre = []
    a = batch
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        inputs.append(a)
        z = a @ w.T + b
        pre.append(z)
        if k < last:
            a = np.maximum(z, 0.0)
        elif net.output_activation == "tanh":
            a = np.tanh(z)
        else:
            a = z
    cache = ForwardCache(net_id=id(net), inputs=inputs, pre_activations=pre, output=a)
    return (a[0] if squeeze else a), cache


def backward(net: Mlp, cache: ForwardCache, grad_output) -> tuple[GradientSet, np.ndarray]:
    """Reverse-mode gradients of mean_b <grad_output_b, output_b>.

    Returns parameter gradients and the gradient with respect to the input
    batch (needed to chain a policy net through a value net). grad_output is
    treated as constant.
    """
    if cache.net_id != id(net):
        raise InputError("forward cache does not belong to this network")
    g, _ = _as_batch(grad_output)
    if g.shape != cache.output.shape:
        raise InputError(f"grad_output shape {g.shape} != output shape {cache.output.shape}")
    batch_size = g.shape[0]
    g = g / batch_size

    d_weights = [None] * len(net.weights)
    d_biases = [None] * len(net.biases)
    for k in range(len(net.weights) - 1, -1, -1):
        if k == len(net.weights) - 1:
            if net.output_activation == "tanh":
                dz = g * (1.0 - cache.output ** 2)
            else:
                dz = g
        else:
            dz = g * (cache.pre_activations[k] > 0.0)
        d_weights[k] = dz.T @ cache.inputs[k]
        d_biases[k] = dz.sum(axis=0)
        g = dz @ net.weights[k]
    return GradientSet(weights=d_weights, biases=d_biases), g


def zero_gradients(net: Mlp) -> GradientSet:
    return GradientSet(
        weights=[np.zeros_like(w) for w in net.weights],
        biases=[np.zeros_like(b) for b in net.biases],
    )
