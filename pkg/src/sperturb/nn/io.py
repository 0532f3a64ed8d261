"""Line-oriented text format for networks.

    NNv1 <L> <input_dim> <output_dim>
    layer <rows> <cols> <act>
    <rows lines of cols weights>
    <one line of rows biases>
    ...

Numbers are written with 17 significant digits, which round-trips every
double exactly.  A layer with per-neuron activations writes ``act`` as
run-length groups, e.g. ``relu*128,tanh*1``.
"""

from __future__ import annotations

import os
from itertools import groupby

import numpy as np

from ..errors import ParseError
from .net import ACTIVATIONS, NeuralNet

MAGIC = "NNv1"


def _fmt(v: float) -> str:
    return "%.17g" % v


def _act_str(act) -> str:
    if isinstance(act, str):
        return act
    return ",".join(f"{tag}*{len(list(g))}" for tag, g in groupby(act))


def _parse_act(text: str, rows: int):
    if "*" not in text and "," not in text:
        if text not in ACTIVATIONS:
            raise ParseError(f"unknown activation {text!r}")
        return text
    tags = []
    for group in text.split(","):
        tag, _, count = group.partition("*")
        if tag not in ACTIVATIONS or not count.isdigit():
            raise ParseError(f"bad activation group {group!r}")
        tags.extend([tag] * int(count))
    if len(tags) != rows:
        raise ParseError(f"{len(tags)} activation tags for {rows} rows")
    return tuple(tags)


def nn_dumps(net: NeuralNet) -> str:
    out = [f"{MAGIC} {net.depth} {net.input_dim} {net.output_dim}"]
    for lay in net.layers:
        out.append(f"layer {lay.rows} {lay.cols} {_act_str(lay.act)}")
        for row in lay.A:
            out.append(" ".join(_fmt(v) for v in row))
        out.append(" ".join(_fmt(v) for v in lay.c))
    return "\n".join(out) + "\n"


def nn_export(net: NeuralNet, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(nn_dumps(net))


def _floats(line: str, n: int, where: str) -> np.ndarray:
    parts = line.split()
    if len(parts) != n:
        raise ParseError(f"{where}: expected {n} numbers, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def nn_loads(text: str) -> NeuralNet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty network file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != MAGIC:
        raise ParseError(f"bad header {lines[0]!r}")
    try:
        L, din, dout = (int(v) for v in head[1:])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}") from None
    if L < 1:
        raise ParseError("depth must be >= 1")
    pos = 1
    layers = []
    for li in range(L):
        if pos >= len(lines):
            raise ParseError(f"truncated file at layer {li}")
        tok = lines[pos].split()
        if len(tok) != 4 or tok[0] != "layer" or not tok[1].isdigit() or not tok[2].isdigit():
            raise ParseError(f"bad layer line {lines[pos]!r}")
        rows, cols = int(tok[1]), int(tok[2])
        act = _parse_act(tok[3], rows)
        pos += 1
        if pos + rows + 1 > len(lines):
            raise ParseError(f"truncated file at layer {li}")
        A = np.vstack([_floats(lines[pos + r], cols, f"layer {li} row {r}") for r in range(rows)])
        c = _floats(lines[pos + rows], rows, f"layer {li} bias")
        pos += rows + 1
        layers.append((A, c, act))
    if pos != len(lines):
        raise ParseError("trailing content after the last layer")
    try:
        net = NeuralNet(layers)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if net.input_dim != din or net.output_dim != dout:
        raise ParseError("header dimensions disagree with the layers")
    return net


def nn_import(path) -> NeuralNet:
    """Read a network file; a missing or unreadable file raises OSError."""
    with open(os.fspath(path), encoding="ascii") as fh:
        return nn_loads(fh.read())
