"""Deep ReLU gadgets: squaring, multiplication and the exponential layer.

The square gadget follows the sawtooth construction: with the hat
g(x) = 2 ReLU(x) - 4 ReLU(x - 1/2) + 2 ReLU(x - 1) and g_s its s-fold
composition,

    f_m(x) = x - sum_{s=1}^m g_s(x) / 4^s

is the piecewise-linear interpolant of x^2 on the dyadic grid of step 2^-m,
so 0 <= f_m(x) - x^2 <= 2^(-2m-2) on [0, 1].
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import EpsilonOutOfRange, NonPositiveReaction, POutOfRange
from .net import NeuralNet, affine_net, compose, stack

_HAT = np.array([2.0, -4.0, 2.0])
_SHIFTS = np.array([0.0, -0.5, -1.0])


def _square_layers(m: int, lin: np.ndarray, use_abs: bool) -> list:
    """Layers computing f_m(a) for a = lin @ input (or |lin @ input| with ``use_abs``).

    The first hidden layer holds the three hat pieces of a (six with
    ``use_abs``, using ReLU(|v| - c) = ReLU(v - c) + ReLU(-v - c) for c >= 0);
    ``collapse`` folds them back into [ReLU(a), ReLU(a - 1/2), ReLU(a - 1)].
    Later hidden layers hold the three hat pieces of g_k(a) and an accumulator.
    """
    lin = np.asarray(lin, dtype=float).reshape(1, -1)
    if use_abs:
        A1 = np.vstack([lin, -lin, lin, -lin, lin, -lin])
        c1 = np.repeat(_SHIFTS, 2)
        collapse = np.kron(np.eye(3), [[1.0, 1.0]])
    else:
        A1 = np.vstack([lin, lin, lin])
        c1 = _SHIFTS.copy()
        collapse = np.eye(3)
    layers = [(A1, c1, "relu")]
    # map from the current layer's neurons to (r1, r2, r3, acc)
    pieces = collapse
    acc = collapse[0]  # acc_1 = ReLU(a) = a
    for k in range(1, m):
        y = _HAT @ pieces  # g_k(a)
        new_acc = acc - y / 4.0**k
        A = np.vstack([y, y, y, new_acc])
        c = np.append(_SHIFTS, 0.0)
        layers.append((A, c, "relu"))
        pieces = np.eye(4)[:3]
        acc = np.eye(4)[3]
    y = _HAT @ pieces
    out = acc - y / 4.0**m
    layers.append((out.reshape(1, -1), [0.0], "identity"))
    return layers


def _check_m(m: int) -> int:
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return int(m)


def relu_square_gadget(m: int) -> NeuralNet:
    """Depth m+1 ReLU net with 0 <= R(x) - x^2 <= 2^(-2m-2) on [0, 1]."""
    m = _check_m(m)
    return NeuralNet(_square_layers(m, [1.0], use_abs=False))


def square_error_bound(m: int) -> float:
    return 2.0 ** (-2 * m - 2)


def relu_product_gadget(m: int, bound: float) -> NeuralNet:
    """Depth m+1 two-input net approximating x*y on [-bound, bound]^2.

    xy = 2B^2 [ S(|x+y|/2B) - S(|x|/2B) - S(|y|/2B) ] with S the square gadget.
    """
    m = _check_m(m)
    if not bound > 0.0:
        raise ValueError(f"bound must be positive, got {bound!r}")
    s = 1.0 / (2.0 * bound)
    forms = ([s, s], [s, 0.0], [0.0, s])
    parts = [NeuralNet(_square_layers(m, f, use_abs=True)) for f in forms]
    par = stack(parts, shared_input=True)
    scale = 2.0 * bound * bound
    return compose(affine_net([[scale, -scale, -scale]], [0.0]), par)


def product_error_bound(m: int, bound: float) -> float:
    return 6.0 * bound * bound * 2.0 ** (-2 * m - 2)


def _relu_pass(dim_in: int, index: int, depth: int) -> NeuralNet:
    """Depth ``depth`` net returning input[index], assumed non-negative."""
    sel = np.zeros((1, dim_in))
    sel[0, index] = 1.0
    layers = [(sel, [0.0], "relu")]
    for _ in range(depth - 2):
        layers.append(([[1.0]], [0.0], "relu"))
    layers.append(([[1.0]], [0.0], "identity"))
    return NeuralNet(layers)


def horner_steps(p: int) -> int:
    """Degree of the Taylor polynomial used for exp(-z) on [0, 1]."""
    return math.ceil(p / 2)


def squaring_count(epsilon: float, b_const: float) -> int:
    Y = 2.0 * math.sqrt(b_const) / epsilon
    return max(0, math.ceil(math.log2(Y)))


def relu_exp_net(p: int, epsilon: float, side: str, b_const: float) -> NeuralNet:
    """ReLU net approximating exp(-sqrt(b)(1 -/+ x)/eps) on [-1, 1].

    With y = sqrt(b)(1 -/+ x)/eps in [0, Y] and z = y/2^K in [0, 1],
    exp(-y) = exp(-z)^(2^K).  exp(-z) is replaced by its Taylor polynomial of
    degree ceil(p/2), evaluated by Horner's rule with product gadgets, the
    result is squared K times by feeding it twice into a product gadget (all
    gadgets with m = p), and the output is clamped to [0, 1] by
    ReLU(v) - ReLU(v - 1).
    """
    if int(p) != p or not (1 <= p <= 24):
        raise POutOfRange(f"p must be an integer in [1, 24], got {p!r}")
    if not (0.0 < epsilon <= 1.0):
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if not b_const > 0.0:
        raise NonPositiveReaction(f"b_const must be positive, got {b_const!r}")
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    p = int(p)
    m = p
    n = horner_steps(p)
    K = squaring_count(epsilon, b_const)
    k = math.sqrt(b_const) / (epsilon * 2.0**K)
    sgn = -1.0 if side == "plus" else 1.0

    # x -> (z, q_{n-1}) with q_{n-1} = 1 - z/n
    A = np.array([[sgn * k], [-sgn * k / n]])
    c = np.array([k, 1.0 - k / n])
    net = affine_net(A, c)

    # q_j = 1 - z q_{j+1} / (j + 1), carrying z alongside
    mult = relu_product_gadget(m, 1.0)
    for j in range(n - 2, -1, -1):
        step = stack([_relu_pass(2, 0, m + 1), mult], shared_input=True)
        post = affine_net([[1.0, 0.0], [0.0, -1.0 / (j + 1)]], [0.0, 1.0])
        net = compose(post, compose(step, net))

    net = compose(affine_net([[0.0, 1.0]], [0.0]), net)  # drop z, keep q_0
    square = compose(mult, affine_net([[1.0], [1.0]], [0.0, 0.0]))
    for _ in range(K):
        net = compose(square, net)
    clamp = NeuralNet([([[1.0], [1.0]], [0.0, -1.0], "relu"), ([[1.0, -1.0]], [0.0], "identity")])
    return compose(clamp, net)
