"""Splitting u = u0 + uBL_- + uBL_+ + uR for constant reaction coefficient."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import UnsupportedData
from ..problem import Problem
from .reference import ReferenceSolution


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Each part maps x to (value, derivative); the layers also carry second derivatives."""

    u0: Callable
    uBL_minus: Callable
    uBL_plus: Callable
    uR: Callable
    uBL_minus_d2: Callable
    uBL_plus_d2: Callable
    s: float

    def parts(self):
        return {"u0": self.u0, "uBL_minus": self.uBL_minus, "uBL_plus": self.uBL_plus, "uR": self.uR}

    def total(self, x):
        x = np.asarray(x, dtype=float)
        vals = [p(x) for p in self.parts().values()]
        return sum(v[0] for v in vals), sum(v[1] for v in vals)


def _layer(s: float, amp: float, side: str):
    """Homogeneous solution equal to ``amp`` at its own endpoint and 0 at the other.

    For the minus side this is amp*(e^{-s(1+x)} - e^{-s(3-x)}) / (1 - e^{-4s}),
    a rewriting of amp*sinh(s(1-x))/sinh(2s) that cannot overflow.
    """
    den = -math.expm1(-4.0 * s)
    sign = 1.0 if side == "minus" else -1.0

    def val_d1(x):
        x = np.asarray(x, dtype=float)
        # y: distance from the layer's own endpoint
        y = 1.0 + sign * x
        near = np.exp(-s * y)
        far = np.exp(-s * (4.0 - y))
        v = amp * (near - far) / den
        dv = amp * sign * (-s) * (near + far) / den
        return v, dv

    def d2(x):
        return s * s * val_d1(x)[0]

    return val_d1, d2


def decompose_const(problem: Problem, ref: ReferenceSolution) -> Decomposition:
    if not problem.b.is_constant:
        raise UnsupportedData(f"reaction coefficient {problem.b_id!r} is not constant")
    b = float(problem.b.poly[0])
    s = math.sqrt(b) / problem.epsilon
    f = problem.f

    def u0(x):
        x = np.asarray(x, dtype=float)
        d1 = f.eval_d1(x) / b if f.eval_d1 is not None else np.zeros_like(x)
        return f(x) / b, d1

    u0m = float(f(-1.0)) / b
    u0p = float(f(1.0)) / b
    minus, minus_d2 = _layer(s, -u0m, "minus")
    plus, plus_d2 = _layer(s, -u0p, "plus")

    def uR(x):
        x = np.asarray(x, dtype=float)
        rv, rd = ref(x)
        parts = (u0(x), minus(x), plus(x))
        return rv - sum(p[0] for p in parts), rd - sum(p[1] for p in parts)

    return Decomposition(u0, minus, plus, uR, minus_d2, plus_d2, s)
