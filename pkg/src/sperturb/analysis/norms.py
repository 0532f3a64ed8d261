"""Energy, weighted and Lebesgue norms by layer-aware composite Gauss quadrature."""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np

from ..errors import NonFinite
from ..mesh import Mesh
from ..problem import Problem
from ..quadrature import composite_points, gauss_rule

NORM_ORDER = 10
# layer-zone breakpoints, in units of eps/sqrt(b_lower) from an endpoint
_LAYER_OFFSETS = np.concatenate(
    [np.arange(0.0, 16.0, 0.5), [16.0, 20.0, 24.0, 32.0, 40.0, 48.0, 64.0]]
)
_LAYER_REACH = _LAYER_OFFSETS[-1]
_WEIGHTED_OFFSETS = np.concatenate(
    [np.arange(0.0, 8.0, 0.125), np.arange(8.0, 32.0, 0.5), [32.0, 40.0, 48.0, 64.0, 96.0]]
)

Panels = Union[Mesh, int, np.ndarray]


def _layer_points(scale: float, offsets: np.ndarray, centers=()) -> np.ndarray:
    """Graded points inward from both endpoints and on both sides of each interior center."""
    d = scale * offsets
    d = d[d < 2.0]
    pts = [-1.0 + d, 1.0 - d]
    for c in centers:
        pts += [c - d, c + d]
    out = np.concatenate(pts)
    return out[(out >= -1.0) & (out <= 1.0)]


def base_edges(panels: Panels) -> np.ndarray:
    if isinstance(panels, Mesh):
        return panels.nodes
    if np.isscalar(panels):
        return np.linspace(-1.0, 1.0, int(panels) + 1)
    return np.asarray(panels, dtype=float)


def layer_panels(problem: Problem, panels: Panels, extra=()) -> np.ndarray:
    """Panel edges: the given panels, layer breakpoints, and the points ``extra``.

    Layer breakpoints are graded on the eps scale near both endpoints and
    near every point in ``extra`` (where the integrand may have an interior
    layer, e.g. a kink of the data).  Panels that reach into a layer zone and
    are wider than eps are split into eight equal pieces.
    """
    eps = problem.epsilon
    scale = eps / math.sqrt(problem.b_lower)
    edges = base_edges(panels)
    extra = np.asarray(extra, dtype=float).ravel()
    # many extra points (an oracle mesh) are panel edges only, not layer centers
    centers = extra if extra.size <= 8 else ()
    pts = [edges, _layer_points(scale, _LAYER_OFFSETS, centers), extra]
    edges = np.unique(np.clip(np.concatenate(pts), -1.0, 1.0))

    reach = _LAYER_REACH * scale
    a, b = edges[:-1], edges[1:]
    in_zone = (a < -1.0 + reach) | (b > 1.0 - reach)
    for c in centers:
        in_zone |= (b > c - reach) & (a < c + reach)
    split = in_zone & ((b - a) > eps)
    if np.any(split):
        frac = np.arange(1, 8) / 8.0
        sub = a[split, None] + (b - a)[split, None] * frac[None, :]
        edges = np.unique(np.concatenate([edges, sub.ravel()]))
    return edges


def integrate(fun: Callable, edges, order: int = NORM_ORDER) -> float:
    x, w = composite_points(edges, gauss_rule(order))
    return float(np.sum(w * fun(x)))


def norm_energy(problem: Problem, e: Callable, panels: Panels = 64, extra=()) -> float:
    """sqrt( int eps^2 e'^2 + b e^2 ) for ``e`` returning (value, derivative)."""
    edges = layer_panels(problem, panels, extra)
    eps2 = problem.epsilon**2

    def integrand(x):
        v, d = e(x)
        return eps2 * d * d + problem.b(x) * v * v

    return math.sqrt(integrate(integrand, edges))


def norm_l2(problem: Problem, e: Callable, panels: Panels = 64, extra=()) -> float:
    edges = layer_panels(problem, panels, extra)

    def integrand(x):
        v = e(x)
        v = v[0] if isinstance(v, tuple) else v
        return v * v

    return math.sqrt(integrate(integrand, edges))


def weight_log(problem: Problem, side: str, x):
    """log w(x) with w = exp((1 -/+ x) / (eps * beta_star)); side 'plus' takes 1 - x."""
    x = np.asarray(x, dtype=float)
    if side == "plus":
        d = 1.0 - x
    elif side == "minus":
        d = 1.0 + x
    else:
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    return d / (problem.epsilon * problem.beta_star)


def weight(problem: Problem, side: str, x):
    return np.exp(weight_log(problem, side, x))


def norm_weighted_L2(problem: Problem, g: Callable, side: str, panels: Panels = 64) -> float:
    """sqrt( int g^2 w^2 ) with the exponential weight of the given side.

    The product g*w is formed in log space, so a g that decays faster than w
    grows never produces inf*0.  An integrand that genuinely overflows raises
    NonFinite.
    """
    eps = problem.epsilon
    scale = eps / math.sqrt(problem.b_lower)
    edges = np.unique(
        np.concatenate([base_edges(panels), _layer_points(scale, _WEIGHTED_OFFSETS)])
    )
    x, w = composite_points(edges, gauss_rule(NORM_ORDER))
    gv = g(x)
    gv = np.asarray(gv[0] if isinstance(gv, tuple) else gv, dtype=float)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(gv))
    expo = 2.0 * (log_abs + weight_log(problem, side, x))
    if np.any(np.isnan(expo)) or np.any(expo > 700.0):
        raise NonFinite("weighted integrand overflows; g does not decay against the weight")
    total = float(np.sum(w * np.exp(expo)))
    if not math.isfinite(total):
        raise NonFinite("weighted integral is not finite")
    return math.sqrt(total)
