"""Exact shallow ReLU realization of continuous piecewise-linear functions."""

from __future__ import annotations

import math

import numpy as np

from ..errors import BadPartition
from ..fem import FeSolution
from .net import NeuralNet


def _anchor(nodes: np.ndarray) -> int:
    zero = np.flatnonzero(nodes == 0.0)
    if zero.size:
        return int(zero[0])
    return (len(nodes) - 1) // 2


def cpwl_to_relu(u, values=None) -> NeuralNet:
    """Depth-2 ReLU net equal to the CpwL interpolant of (nodes, values).

    ``u`` is a FeSolution, or the node array when ``values`` is given.

    The expansion is anchored at an interior node x_m (the node at 0 when
    there is one):

        R(t) = v_m + sum_{j<=m} a_j ReLU(x_j - t) + sum_{j>=m} b_j ReLU(t - x_j)

    with a_m = -s_m, b_m = s_{m+1}, and slope jumps s_{j+1} - s_j elsewhere,
    where s_j is the slope on [x_{j-1}, x_j].  Growing the sum from the middle
    keeps every active term local: inside a layer, t - x_j is computed
    exactly and the large layer slopes never cancel against o(1) values.
    This gives N hidden neurons with hidden weights +-1 and biases -+x_j; a
    neuron whose output weight would exceed ``weight_bound`` is rescaled by a
    power of two.  Size is at most 3N when 0 is a node, 3N + 1 otherwise.

    Derivative convention (ReLU'(0) = 0): at a node left of x_m the net reports
    the slope of the element to the right, at a node right of x_m the slope
    of the element to the left, and at x_m itself zero.
    """
    if isinstance(u, FeSolution):
        nodes, vals = u.mesh.nodes, u.coeffs
    else:
        nodes, vals = u, values
    nodes = np.asarray(nodes, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2 or vals.shape != nodes.shape:
        raise BadPartition("need matching 1-d node and value arrays with at least 2 nodes")
    h = np.diff(nodes)
    if np.any(h <= 0.0) or not np.all(np.isfinite(nodes)):
        raise BadPartition("nodes must be strictly increasing")

    N = nodes.size - 1
    s = np.diff(vals) / h  # s[j-1] is the slope on element j
    m = _anchor(nodes)
    if N == 1:
        m = 0

    weights, biases, coef = [], [], []
    # left neurons ReLU(x_j - t), j = 1..m
    for j in range(1, m + 1):
        weights.append(-1.0)
        biases.append(nodes[j])
        coef.append(-s[m - 1] if j == m else s[j] - s[j - 1])
    # right neurons ReLU(t - x_j), j = m..N-1
    for j in range(m, N):
        weights.append(1.0)
        biases.append(-nodes[j])
        coef.append(s[m] if j == m else s[j] - s[j - 1])

    # ReLU(k z) = k ReLU(z) for k > 0; a power of two k keeps k*t - k*x_j as
    # exact as t - x_j, so large slope jumps can be moved into the hidden
    # weights without changing the realization
    bound = weight_bound(nodes, vals)
    for i, c in enumerate(coef):
        if abs(c) > bound:
            k = 2.0 ** math.ceil(math.log2(abs(c) / bound))
            while k > bound and k > 1.0:
                k /= 2.0
            weights[i] *= k
            biases[i] *= k
            coef[i] = c / k

    A1 = np.array(weights).reshape(-1, 1)
    c1 = np.array(biases)
    A2 = np.array(coef).reshape(1, -1)
    c2 = np.array([vals[m]])
    return NeuralNet([(A1, c1, "relu"), (A2, c2, "identity")])


def weight_bound(nodes, values) -> float:
    """max{1 + h_1, ||phi||_inf, 2 max_j 1/h_j}."""
    h = np.diff(np.asarray(nodes, dtype=float))
    return max(1.0 + h[0], float(np.max(np.abs(values))), 2.0 * float(np.max(1.0 / h)))


def max_weight(net: NeuralNet) -> float:
    return max(max(np.max(np.abs(l.A)), np.max(np.abs(l.c), initial=0.0)) for l in net.layers)
