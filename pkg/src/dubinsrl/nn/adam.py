"""Adam optimizer state and update rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .mlp import GradientSet, Mlp


@dataclass
class AdamState:
    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_adam(net: Mlp, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        m_weights=[np.zeros_like(w) for w in net.weights],
        v_weights=[np.zeros_like(w) for w in net.weights],
        m_biases=[np.zeros_like(b) for b in net.biases],
        v_biases=[np.zeros_like(b) for b in net.biases],
        beta1=beta1, beta2=beta2, eps=eps,
    )


def _update(param, grad, m, v, state: AdamState, lr: float, correction1: float, correction2: float):
    m *= state.beta1
    m += (1.0 - state.beta1) * grad
    v *= state.beta2
    v += (1.0 - state.beta2) * grad * grad
    m_hat = m / correction1
    v_hat = v / correction2
    param -= lr * m_hat / (np.sqrt(v_hat) + state.eps)


def adam_step(net: Mlp, grads: GradientSet, state: AdamState, lr: float) -> tuple[Mlp, AdamState]:
    """One bias-corrected Adam update, in place. Non-finite gradients are
    rejected before any state is touched."""
    if len(grads.weights) != len(net.weights) or any(
            gw.shape != w.shape for gw, w in zip(grads.weights, net.weights)) or any(
            gb.shape != b.shape for gb, b in zip(grads.biases, net.biases)):
        raise InputError("gradient shapes are not congruent with the network")
    if not grads.is_finite():
        raise InputError("non-finite gradients rejected; optimizer state untouched")
    state.t += 1
    correction1 = 1.0 - state.beta1 ** state.t
    correction2 = 1.0 - state.beta2 ** state.t
    for w, gw, m, v in zip(net.weights, grads.weights, state.m_weights, state.v_weights):
        _update(w, gw, m, v, state, lr, correction1, correction2)
    for b, gb, m, v in zip(net.biases, grads.biases, state.m_biases, state.v_biases):
        _update(b, gb, m, v, state, lr, correction1, correction2)
    return net, state
