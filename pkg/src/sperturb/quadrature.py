"""Gauss-Legendre rules on the reference element [0, 1] and composite sums."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    order: int
    points: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> QuadratureRule:
    """``order``-point Gauss rule on [0, 1]; exact up to degree 2*order - 1."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    xi, w = np.polynomial.legendre.leggauss(order)
    pts = 0.5 * (xi + 1.0)
    wts = 0.5 * w
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(order, pts, wts)


def composite_points(edges, rule: QuadratureRule):
    """Quadrature nodes and weights for the panels delimited by ``edges``.

    Returns arrays of shape (n_panels, order).
    """
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1, None]
    h = np.diff(edges)[:, None]
    x = a + h * rule.points[None, :]
    w = h * rule.weights[None, :]
    return x, w
