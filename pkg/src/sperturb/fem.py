"""P1 Galerkin discretization on a one-dimensional partition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, SingularSystem
from .mesh import Mesh
from .problem import Problem
from .quadrature import QuadratureRule, composite_points, gauss_rule

log = logging.getLogger(__name__)

DEFAULT_QUAD_ORDER = 5
PIVOT_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class FeSolution:
    """Continuous piecewise-linear function given by its nodal values."""

    mesh: Mesh
    coeffs: np.ndarray
    bc_respected: bool = True

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh.nodes

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.coeffs) / self.mesh.h

    def __call__(self, x):
        return eval_fe(self, x)


def assemble(problem: Problem, mesh: Mesh, quad: QuadratureRule | None = None):
    """Tridiagonal stiffness-plus-mass system over the interior nodes.

    Returns ``((lower, diag, upper), load)`` where ``lower[i]`` couples
    interior unknowns ``i+1`` and ``i``.  The diffusion block is integrated
    exactly; reaction and load use the element Gauss rule ``quad``.
    """
    quad = quad or gauss_rule(DEFAULT_QUAD_ORDER)
    if quad.order < 2:
        raise ValueError("assembly needs at least a 2-point rule")
    eps2 = problem.epsilon**2
    h = mesh.h
    xq, wq = composite_points(mesh.nodes, quad)
    xi = quad.points[None, :]
    phi_l = 1.0 - xi
    phi_r = xi
    bw = problem.b(xq) * wq
    fw = problem.f(xq) * wq

    # element matrices [[k_ll, k_lr], [k_lr, k_rr]] and load [f_l, f_r]
    k_ll = eps2 / h + np.sum(bw * phi_l * phi_l, axis=1)
    k_rr = eps2 / h + np.sum(bw * phi_r * phi_r, axis=1)
    k_lr = -eps2 / h + np.sum(bw * phi_l * phi_r, axis=1)
    f_l = np.sum(fw * phi_l, axis=1)
    f_r = np.sum(fw * phi_r, axis=1)

    # interior node i (1..N-1) is the right end of element i-1 and the left end of element i
    diag = k_rr[:-1] + k_ll[1:]
    off = k_lr[1:-1].copy()
    load = f_r[:-1] + f_l[1:]
    return (off, diag, off.copy()), load


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """LU factorization without pivoting for a tridiagonal system."""
    n = len(diag)
    cp = np.empty(max(n - 1, 0))
    dp = np.empty(n)
    piv = diag[0]
    if abs(piv) < PIVOT_FLOOR:
        raise SingularSystem("zero pivot at row 0")
    if n > 1:
        cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if abs(piv) < PIVOT_FLOOR:
            raise SingularSystem(f"zero pivot at row {i}")
        if i < n - 1:
            cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv
    x = dp
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


def tridiag_matvec(lower, diag, upper, x) -> np.ndarray:
    y = diag * x
    y[:-1] += upper * x[1:]
    y[1:] += lower * x[:-1]
    return y


def solve(problem: Problem, mesh: Mesh, quad: QuadratureRule | None = None) -> FeSolution:
    (lower, diag, upper), load = assemble(problem, mesh, quad)
    interior = thomas_solve(lower, diag, upper, load)
    resid = np.max(np.abs(tridiag_matvec(lower, diag, upper, interior) - load), initial=0.0)
    limit = 1e-10 * (np.max(np.abs(load), initial=0.0) + 1.0)
    if resid > limit:
        log.warning("linear residual %.3e exceeds %.3e", resid, limit)
    coeffs = np.concatenate([[0.0], interior, [0.0]])
    return FeSolution(mesh, coeffs, True)


def element_index(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Index j of the element [x_j, x_{j+1}] containing x; interior nodes go right."""
    idx = np.searchsorted(nodes, x, side="right") - 1
    return np.clip(idx, 0, len(nodes) - 2)


def eval_fe(u: FeSolution, x):
    """Value and slope of ``u`` at ``x``.

    At an interior node the slope of the element to the right is returned;
    at x = 1 the last element's slope.
    """
    x = np.asarray(x, dtype=float)
    nodes = u.mesh.nodes
    if np.any((x < nodes[0]) | (x > nodes[-1])) or np.any(np.isnan(x)):
        raise DomainError(f"evaluation point outside [{nodes[0]}, {nodes[-1]}]")
    j = element_index(nodes, x)
    s = (u.coeffs[j + 1] - u.coeffs[j]) / u.mesh.h[j]
    val = u.coeffs[j] + s * (x - nodes[j])
    # reproduce nodal values exactly
    val = np.where(x == nodes[j + 1], u.coeffs[j + 1], val)
    return val, s


def interpolant(mesh: Mesh, func: Callable) -> FeSolution:
    """Nodal interpolant; ``func`` may return a value or a (value, derivative) pair."""
    vals = func(mesh.nodes)
    if isinstance(vals, tuple):
        vals = vals[0]
    vals = np.asarray(vals, dtype=float).copy()
    bc = abs(vals[0]) < 1e-300 and abs(vals[-1]) < 1e-300
    if bc:
        vals[0] = vals[-1] = 0.0
    return FeSolution(mesh, vals, bc)


Evaluable = Union[FeSolution, Callable]


def ritz_energy(
    problem: Problem,
    v: Evaluable,
    quad_n: int = 64,
    order: int = DEFAULT_QUAD_ORDER,
) -> float:
    """Deep-Ritz energy  1/2 B(v, v) - F(v).

    FE functions are integrated element by element with the assembly rule,
    so the Galerkin solution is the exact discrete minimizer.  Any other
    ``v`` (a callable returning value and derivative) is integrated over
    ``quad_n`` uniform panels.
    """
    rule = gauss_rule(order)
    if isinstance(v, FeSolution):
        edges = v.mesh.nodes
        xq, wq = composite_points(edges, rule)
        c = v.coeffs
        xi = rule.points[None, :]
        val = c[:-1, None] * (1.0 - xi) + c[1:, None] * xi
        der = np.broadcast_to(((c[1:] - c[:-1]) / v.mesh.h)[:, None], xq.shape)
    else:
        if quad_n < 1:
            raise ValueError("quad_n must be >= 1")
        edges = np.linspace(-1.0, 1.0, quad_n + 1)
        xq, wq = composite_points(edges, rule)
        val, der = v(xq)
        val = np.broadcast_to(np.asarray(val, dtype=float), xq.shape)
        der = np.broadcast_to(np.asarray(der, dtype=float), xq.shape)
    eps2 = problem.epsilon**2
    bilinear = np.sum(wq * (eps2 * der * der + problem.b(xq) * val * val))
    load = np.sum(wq * problem.f(xq) * val)
    return 0.5 * float(bilinear) - float(load)


def hat(mesh: Mesh, j: int) -> FeSolution:
    """Nodal basis function of node ``j``."""
    c = np.zeros(mesh.N + 1)
    c[j] = 1.0
    return FeSolution(mesh, c, 0 < j < mesh.N)
