"""Reference solutions: closed forms for constant b, fine-grid Galerkin otherwise."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from ..errors import UnsupportedData
from ..fem import eval_fe, solve
from ..mesh import MeshKind, build_mesh
from ..problem import Problem

CLOSED_FORM = "ClosedFormConstB"
FINE_GRID = "FineGridOracle"
MIN_ORACLE_N = 4096


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    kind: str
    eval: Callable
    provenance: str
    oracle_N: Optional[int] = None
    d2: Optional[Callable] = None
    # points where u'' may jump; quadrature panels should break there
    breakpoints: tuple | np.ndarray = field(default=())

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))


class _Layers:
    """Stable evaluation of cosh(s x)/cosh(s) and sinh(s x)/sinh(s) on [-1, 1]."""

    def __init__(self, s: float):
        self.s = s
        self.cden = 1.0 + math.exp(-2.0 * s)
        self.sden = -math.expm1(-2.0 * s)

    def parts(self, x):
        return np.exp(self.s * (x - 1.0)), np.exp(-self.s * (x + 1.0))

    def cosh_ratio(self, x):
        a, b = self.parts(x)
        return (a + b) / self.cden, self.s * (a - b) / self.cden

    def sinh_ratio(self, x):
        a, b = self.parts(x)
        return (a - b) / self.sden, self.s * (a + b) / self.sden


def _require_const_b(problem: Problem) -> float:
    if not problem.b.is_constant:
        raise UnsupportedData(f"reaction coefficient {problem.b_id!r} is not constant")
    return float(problem.b.poly[0])


def _particular_poly(coeffs, b: float, eps: float) -> Polynomial:
    """Polynomial p with -eps^2 p'' + b p = f, by the Neumann series in D^2."""
    f = Polynomial(coeffs)
    term = f / b
    p = term
    ratio = eps * eps / b
    while term.degree() >= 2:
        term = term.deriv(2) * ratio
        p = p + term
    return p


def closed_form_const(problem: Problem) -> ReferenceSolution:
    """Exact solution for constant b and f a polynomial of degree <= 4 or |x|."""
    b = _require_const_b(problem)
    eps = problem.epsilon
    s = math.sqrt(b) / eps
    lay = _Layers(s)
    fid = problem.f_id

    if problem.f.poly is not None:
        if len(problem.f.poly) > 5:
            raise UnsupportedData("polynomial source of degree > 4")
        p = _particular_poly(problem.f.poly, b, eps)
        dp, ddp = p.deriv(1), p.deriv(2)
        A = -0.5 * (p(1.0) + p(-1.0))
        B = -0.5 * (p(1.0) - p(-1.0))

        def u(x):
            c, dc = lay.cosh_ratio(x)
            sn, dsn = lay.sinh_ratio(x)
            return p(x) + A * c + B * sn, dp(x) + A * dc + B * dsn

        def u2(x):
            c, _ = lay.cosh_ratio(x)
            sn, _ = lay.sinh_ratio(x)
            return ddp(x) + s * s * (A * c + B * sn)

        desc = f"closed form, b={b:g}, f={fid}, eps={eps:g}"
        return ReferenceSolution(CLOSED_FORM, u, desc, d2=u2)

    if fid == "absx":
        # |x|/b + exp(-s|x|)/(b s) cancels the kink of |x|/b; cosh term fixes the BCs
        A = -(1.0 / b + math.exp(-s) / (b * s))

        def u(x):
            ax = np.abs(x)
            sg = np.sign(x)
            g = np.exp(-s * ax)
            c, dc = lay.cosh_ratio(x)
            return ax / b + g / (b * s) + A * c, sg * (1.0 - g) / b + A * dc

        def u2(x):
            c, _ = lay.cosh_ratio(x)
            return (s / b) * np.exp(-s * np.abs(x)) + A * s * s * c

        desc = f"closed form, b={b:g}, f=absx, eps={eps:g}"
        return ReferenceSolution(CLOSED_FORM, u, desc, d2=u2, breakpoints=(0.0,))

    raise UnsupportedData(f"no closed form for source {fid!r}")


def fine_grid_oracle(problem: Problem, oracle_N: int = 16384) -> ReferenceSolution:
    """Galerkin solution on a fine Shishkin mesh, used where no closed form exists."""
    if oracle_N % 4 or oracle_N < MIN_ORACLE_N:
        raise ValueError(f"oracle_N must be divisible by 4 and >= {MIN_ORACLE_N}")
    mesh = build_mesh(MeshKind.SHISHKIN, oracle_N, problem)
    uh = solve(problem, mesh)

    def u(x):
        return eval_fe(uh, x)

    desc = f"P1 Galerkin on Shishkin mesh, oracle_N={oracle_N}, eps={problem.epsilon:g}"
    # the oracle is piecewise linear, so its nodes are natural panel breaks
    return ReferenceSolution(FINE_GRID, u, desc, oracle_N=oracle_N, breakpoints=mesh.nodes)


def reference_for(problem: Problem, oracle_N: int = 16384) -> ReferenceSolution:
    """Closed form when available, fine-grid oracle otherwise."""
    try:
        return closed_form_const(problem)
    except UnsupportedData:
        return fine_grid_oracle(problem, oracle_N)
