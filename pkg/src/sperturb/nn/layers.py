"""One-neuron tanh network for the exponential boundary layer."""

from __future__ import annotations

import math

import numpy as np

from ..errors import EpsilonOutOfRange, NonPositiveReaction
from .net import NeuralNet

# R(y) = a*(tanh(y/2 + gamma) - 1) = e^{-y} / (1 + Q e^{-y}) with Q = e^{-2 gamma}.
# Sup errors over y >= 0 are both attained at y = 0:
#   value       Q / (1 + Q)          = 1/17   ~ 0.0588
#   derivative  1 - 1 / (1 + Q)^2    = 33/289 ~ 0.1142
TEMPLATE_Q = 1.0 / 16.0
TEMPLATE_BETA = 0.5
TEMPLATE_GAMMA = -0.5 * math.log(TEMPLATE_Q)
TEMPLATE_A = -1.0 / (2.0 * TEMPLATE_Q)

VALUE_ERROR_BOUND = TEMPLATE_Q / (1.0 + TEMPLATE_Q)
DERIV_ERROR_BOUND = 1.0 - 1.0 / (1.0 + TEMPLATE_Q) ** 2


def template(y):
    """Closed form of the template realization in the half-line variable y."""
    y = np.asarray(y, dtype=float)
    e = np.exp(-y)
    return e / (1.0 + TEMPLATE_Q * e)


def template_d1(y):
    y = np.asarray(y, dtype=float)
    e = np.exp(-y)
    return -e / (1.0 + TEMPLATE_Q * e) ** 2


def _net(w: float, c: float) -> NeuralNet:
    a = TEMPLATE_A
    return NeuralNet([([[w]], [c], "tanh"), ([[a]], [-a], "identity")])


def tanh_template_net() -> NeuralNet:
    """The template as a net of the half-line argument y."""
    return _net(TEMPLATE_BETA, TEMPLATE_GAMMA)


def tanh_layer_net(side: str, epsilon: float, b_const: float) -> NeuralNet:
    """Depth 2, size 4 tanh net approximating exp(-sqrt(b) (1 -/+ x) / eps) on [-1, 1].

    ``side='plus'`` gives the layer at x = 1, ``'minus'`` the one at x = -1.
    """
    if not (0.0 < epsilon <= 1.0):
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if not b_const > 0.0:
        raise NonPositiveReaction(f"b_const must be positive, got {b_const!r}")
    k = TEMPLATE_BETA * math.sqrt(b_const) / epsilon
    if side == "plus":
        # y = sqrt(b)(1 - x)/eps
        return _net(-k, k + TEMPLATE_GAMMA)
    if side == "minus":
        return _net(k, k + TEMPLATE_GAMMA)
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
