"""Feedforward networks as sequences of (A, c, activation) triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..errors import DimensionMismatch

ACTIVATIONS = ("relu", "tanh", "identity")
Act = Union[str, tuple]


@dataclass(frozen=True, eq=False)
class Layer:
    A: np.ndarray
    c: np.ndarray
    # one tag for the whole layer, or a tuple with one tag per neuron
    act: Act = "relu"

    @property
    def rows(self) -> int:
        return self.A.shape[0]

    @property
    def cols(self) -> int:
        return self.A.shape[1]

    def tags(self) -> tuple:
        if isinstance(self.act, str):
            return (self.act,) * self.rows
        return tuple(self.act)


def _normalize_act(act, rows: int) -> Act:
    if isinstance(act, str):
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act!r}")
        return act
    tags = tuple(act)
    if len(tags) != rows:
        raise DimensionMismatch(f"{len(tags)} activation tags for {rows} neurons")
    for t in tags:
        if t not in ACTIVATIONS:
            raise ValueError(f"unknown activation {t!r}")
    if len(set(tags)) == 1:
        return tags[0]
    return tags


class NeuralNet:
    """Immutable network; ``layers[-1]`` is affine (identity activation)."""

    def __init__(self, layers: Sequence):
        built = []
        for i, lay in enumerate(layers):
            if isinstance(lay, Layer):
                A, c, act = lay.A, lay.c, lay.act
            else:
                A, c, act = lay
            A = np.array(A, dtype=float, ndmin=2)
            c = np.array(c, dtype=float).reshape(-1)
            if c.shape[0] != A.shape[0]:
                raise DimensionMismatch(f"layer {i}: bias length {c.shape[0]} != rows {A.shape[0]}")
            if built and built[-1].rows != A.shape[1]:
                raise DimensionMismatch(
                    f"layer {i}: {A.shape[1]} columns but previous layer has {built[-1].rows} rows")
            A.setflags(write=False)
            c.setflags(write=False)
            built.append(Layer(A, c, _normalize_act(act, A.shape[0])))
        if not built:
            raise DimensionMismatch("a network needs at least one layer")
        if built[-1].act != "identity":
            raise ValueError("the last layer must have identity activation")
        self.layers = tuple(built)

    @property
    def input_dim(self) -> int:
        return self.layers[0].cols

    @property
    def output_dim(self) -> int:
        return self.layers[-1].rows

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return int(sum(np.count_nonzero(l.A) + np.count_nonzero(l.c) for l in self.layers))

    @property
    def width(self) -> int:
        hidden = [l.rows for l in self.layers[:-1]]
        return max(hidden) if hidden else 0

    def __call__(self, x):
        return realize(self, x)

    def __repr__(self):
        return (f"NeuralNet(depth={self.depth}, width={self.width}, size={self.size}, "
                f"in={self.input_dim}, out={self.output_dim})")


def _apply(act: Act, z: np.ndarray) -> np.ndarray:
    if isinstance(act, str):
        if act == "relu":
            return np.maximum(z, 0.0)
        if act == "tanh":
            return np.tanh(z)
        return z
    out = z.copy()
    tags = np.array(act)
    relu = tags == "relu"
    tanh = tags == "tanh"
    out[..., relu] = np.maximum(z[..., relu], 0.0)
    out[..., tanh] = np.tanh(z[..., tanh])
    return out


def _dact(act: Act, z: np.ndarray) -> np.ndarray:
    """Activation derivative, with ReLU'(0) = 0."""
    def one(tag, v):
        if tag == "relu":
            return (v > 0.0).astype(float)
        if tag == "tanh":
            return 1.0 - np.tanh(v) ** 2
        return np.ones_like(v)

    if isinstance(act, str):
        return one(act, z)
    out = np.empty_like(z)
    for j, tag in enumerate(act):
        out[..., j] = one(tag, z[..., j])
    return out


def _as_batch(net: NeuralNet, x):
    """Rows of shape (n, input_dim) plus the output shape to restore."""
    x = np.asarray(x, dtype=float)
    d, o = net.input_dim, net.output_dim
    if d == 1:
        # every entry is a point; the output keeps the input's shape
        shape = x.shape if o == 1 else x.shape + (o,)
        return x.reshape(-1, 1), shape
    if x.ndim == 1 and x.shape[0] == d:
        return x.reshape(1, d), (o,)
    if x.ndim == 2 and x.shape[1] == d:
        return x, (x.shape[0], o)
    raise DimensionMismatch(f"input of shape {x.shape} for input_dim {d}")


def realize(net: NeuralNet, x):
    """Evaluate the realization.

    A 1-input net treats ``x`` (scalar or array of any shape) as a set of
    points and returns the same shape; otherwise pass one point of length
    input_dim or a batch of shape (n, input_dim).
    """
    z, shape = _as_batch(net, x)
    for lay in net.layers:
        z = _apply(lay.act, z @ lay.A.T + lay.c)
    return z.reshape(shape)


def realize_d1(net: NeuralNet, x):
    """Derivative d R / d x of a scalar net by forward-mode chain rule."""
    if net.input_dim != 1 or net.output_dim != 1:
        raise DimensionMismatch("realize_d1 needs input_dim = output_dim = 1")
    z, shape = _as_batch(net, x)
    dz = np.ones_like(z)
    for lay in net.layers:
        pre = z @ lay.A.T + lay.c
        dpre = dz @ lay.A.T
        z = _apply(lay.act, pre)
        dz = _dact(lay.act, pre) * dpre
    return dz.reshape(shape)


def realize_with_d1(net: NeuralNet, x):
    return realize(net, x), realize_d1(net, x)


def affine_net(A, c) -> NeuralNet:
    return NeuralNet([(A, c, "identity")])


def compose(outer: NeuralNet, inner: NeuralNet) -> NeuralNet:
    """Network for outer(inner(x)); the two affine maps at the seam are merged."""
    if inner.output_dim != outer.input_dim:
        raise DimensionMismatch(f"inner output {inner.output_dim} != outer input {outer.input_dim}")
    last = inner.layers[-1]
    first = outer.layers[0]
    merged = Layer(first.A @ last.A, first.A @ last.c + first.c, first.act)
    return NeuralNet(list(inner.layers[:-1]) + [merged] + list(outer.layers[1:]))


def stack(nets: Sequence[NeuralNet], shared_input: bool = False) -> NeuralNet:
    """Run nets of equal depth side by side.

    With ``shared_input`` all nets read the same input vector; otherwise the
    inputs are concatenated.  Outputs are always concatenated.
    """
    depth = nets[0].depth
    if any(n.depth != depth for n in nets):
        raise DimensionMismatch("stack needs nets of equal depth")
    if shared_input and len({n.input_dim for n in nets}) != 1:
        raise DimensionMismatch("shared input needs equal input_dim")
    layers = []
    for li in range(depth):
        blocks = [n.layers[li] for n in nets]
        rows = sum(b.rows for b in blocks)
        if li == 0 and shared_input:
            A = np.vstack([b.A for b in blocks])
        else:
            cols = sum(b.cols for b in blocks)
            A = np.zeros((rows, cols))
            r = c = 0
            for b in blocks:
                A[r:r + b.rows, c:c + b.cols] = b.A
                r += b.rows
                c += b.cols
        cvec = np.concatenate([b.c for b in blocks])
        tags = sum((b.tags() for b in blocks), ())
        layers.append((A, cvec, tags))
    return NeuralNet(layers)


def identity_relu_net(dim: int, depth: int) -> NeuralNet:
    """Depth-``depth`` ReLU net realizing x -> x in R^dim via x = ReLU(x) - ReLU(-x)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    eye = np.eye(dim)
    if depth == 1:
        return affine_net(eye, np.zeros(dim))
    pm = np.vstack([eye, -eye])
    layers = [(pm, np.zeros(2 * dim), "relu")]
    for _ in range(depth - 2):
        layers.append((np.eye(2 * dim), np.zeros(2 * dim), "relu"))
    layers.append((np.hstack([eye, -eye]), np.zeros(dim), "identity"))
    return NeuralNet(layers)


def pad_depth(net: NeuralNet, depth: int) -> NeuralNet:
    """Deepen ``net`` to ``depth`` layers without changing its realization.

    The identity pair is merged into either the input or the output side;
    the variant with fewer nonzero weights is returned.
    """
    deficit = depth - net.depth
    if deficit < 0:
        raise ValueError("cannot reduce depth")
    if deficit == 0:
        return net
    out_side = compose(identity_relu_net(net.output_dim, deficit + 1), net)
    in_side = compose(net, identity_relu_net(net.input_dim, deficit + 1))
    return in_side if in_side.size < out_side.size else out_side


def parallelize(nets: Sequence[NeuralNet], combine_weights) -> NeuralNet:
    """Single net realizing sum_i w_i R(net_i) for scalar nets sharing one input."""
    nets = list(nets)
    w = np.asarray(combine_weights, dtype=float).reshape(-1)
    if not nets or len(nets) != w.size:
        raise DimensionMismatch(f"{len(nets)} nets but {w.size} combine weights")
    for n in nets:
        if n.input_dim != 1 or n.output_dim != 1:
            raise DimensionMismatch("parallelize needs scalar nets (input_dim = output_dim = 1)")
    depth = max(n.depth for n in nets)
    padded = [pad_depth(n, depth) for n in nets]
    if depth == 1:
        A = sum(wi * n.layers[0].A for wi, n in zip(w, padded))
        c = sum(wi * n.layers[0].c for wi, n in zip(w, padded))
        return affine_net(A, c)
    par = stack(padded, shared_input=True)
    last = par.layers[-1]
    combined = Layer(w[None, :] @ last.A, np.array([w @ last.c]), "identity")
    return NeuralNet(list(par.layers[:-1]) + [combined])
