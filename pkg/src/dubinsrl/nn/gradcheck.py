"""Central finite-difference gradients, the verification oracle for backward().

Cost is two forward passes per parameter, so this is only for small nets.
"""

from __future__ import annotations

import numpy as np

from .mlp import GradientSet, Mlp, forward


def finite_difference_grad(net: Mlp, inputs, loss_fn, h: float = 1e-6) -> GradientSet:
    """Gradient of loss_fn(outputs) with respect to every parameter.

    loss_fn maps the forward outputs on `inputs` to a scalar; it may route
    the outputs through other (fixed) networks, which is how composed
    objectives are checked.
    """
    def loss_now() -> float:
        out, _ = forward(net, inputs)
        return float(loss_fn(out))

    def central(param: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(param)
        flat = param.ravel()
        gflat = grad.ravel()
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            up = loss_now()
            flat[i] = original - h
            down = loss_now()
            flat[i] = original
            gflat[i] = (up - down) / (2.0 * h)
        return grad

    return GradientSet(
        weights=[central(w) for w in net.weights],
        biases=[central(b) for b in net.biases],
    )


def max_relative_error(analytic: GradientSet, numeric: GradientSet) -> float:
    """Largest elementwise |a - n| / max(1, |n|) across all parameters."""
    worst = 0.0
    for a, n in zip(analytic.weights + analytic.biases, numeric.weights + numeric.biases):
        denom = np.maximum(1.0, np.abs(n))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
