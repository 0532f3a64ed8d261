"""Model problem  -eps^2 u'' + b u = f  on (-1, 1),  u(-1) = u(1) = 0.

Coefficients come from a closed-form registry so that test data are
deterministic and carry exact derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import EpsilonOutOfRange, NonPositiveReaction, UnknownRegistryId

ArrayFn = Callable[[np.ndarray], np.ndarray]

REGULARITY_TAGS = ("H1", "H2", "C2", "analytic")

# number of equispaced points used to estimate inf/sup of b
BOUND_GRID = 10_001


@dataclass(frozen=True)
class CoefficientFn:
    registry_id: str
    eval: ArrayFn
    eval_d1: Optional[ArrayFn] = None
    eval_d2: Optional[ArrayFn] = None
    regularity_tag: str = "analytic"
    # exact extrema on [-1, 1], used in place of the grid estimate
    exact_min: Optional[float] = None
    exact_max: Optional[float] = None
    # polynomial coefficients (ascending powers) when the function is a polynomial
    poly: Optional[tuple] = None

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    @property
    def is_constant(self) -> bool:
        return self.poly is not None and len(self.poly) == 1


def _const(c):
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


_REGISTRY = {
    "one": CoefficientFn(
        "one", _const(1.0), _const(0.0), _const(0.0), "analytic", 1.0, 1.0, poly=(1.0,)
    ),
    "poly2": CoefficientFn(
        "poly2",
        lambda x: 1.0 + x * x,
        lambda x: 2.0 * x,
        _const(2.0),
        "analytic",
        1.0,
        2.0,
        poly=(1.0, 0.0, 1.0),
    ),
    "zero": CoefficientFn(
        "zero", _const(0.0), _const(0.0), _const(0.0), "analytic", 0.0, 0.0, poly=(0.0,)
    ),
    "x": CoefficientFn(
        "x", lambda x: x, _const(1.0), _const(0.0), "analytic", -1.0, 1.0, poly=(0.0, 1.0)
    ),
    "absx": CoefficientFn(
        "absx", np.abs, np.sign, None, "H1", 0.0, 1.0
    ),
    "2+sin(pi x)": CoefficientFn(
        "2+sin(pi x)",
        lambda x: 2.0 + np.sin(np.pi * x),
        lambda x: np.pi * np.cos(np.pi * x),
        lambda x: -np.pi**2 * np.sin(np.pi * x),
        "analytic",
        1.0,
        3.0,
    ),
    "b_h1": CoefficientFn(
        "b_h1", lambda x: 2.0 + np.abs(x), np.sign, None, "H1", 2.0, 3.0
    ),
}


def registry_list() -> list[tuple[str, str]]:
    """(id, regularity_tag) pairs in a fixed order."""
    return [(key, fn.regularity_tag) for key, fn in _REGISTRY.items()]


def get_coefficient(registry_id: str) -> CoefficientFn:
    try:
        return _REGISTRY[registry_id]
    except KeyError:
        raise UnknownRegistryId(registry_id) from None


@dataclass(frozen=True)
class Problem:
    epsilon: float
    b: CoefficientFn
    f: CoefficientFn
    b_lower: float
    b_upper: float
    beta_star: float
    theta: float
    k: int

    @property
    def b_id(self) -> str:
        return self.b.registry_id

    @property
    def f_id(self) -> str:
        return self.f.registry_id

    def with_epsilon(self, epsilon: float) -> "Problem":
        return make_problem(epsilon, self.b_id, self.f_id)


def _sobolev_order(tag: str) -> int:
    return 1 if tag == "H1" else 2


def make_problem(epsilon: float, b_id: str, f_id: str) -> Problem:
    """Build a validated problem instance.

    ``b_lower`` is the infimum of b over a 10 001-point grid unless the
    registry supplies the exact value.  The layer constants follow from it:
    ``beta_star = 2 / sqrt(b_lower)`` and ``theta = 2 * beta_star``.
    """
    if not (0.0 < epsilon <= 1.0) or not math.isfinite(epsilon):
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {epsilon!r}")
    b = get_coefficient(b_id)
    f = get_coefficient(f_id)

    grid = np.linspace(-1.0, 1.0, BOUND_GRID)
    bv = b(grid)
    lo = float(bv.min())
    hi = float(bv.max())
    if lo <= 0.0:
        raise NonPositiveReaction(f"reaction coefficient {b_id!r} has grid infimum {lo}")
    if b.exact_min is not None:
        lo = b.exact_min
    if b.exact_max is not None:
        hi = b.exact_max

    beta_star = 2.0 / math.sqrt(lo)
    k = min(_sobolev_order(b.regularity_tag), _sobolev_order(f.regularity_tag))
    return Problem(
        epsilon=float(epsilon),
        b=b,
        f=f,
        b_lower=lo,
        b_upper=hi,
        beta_star=beta_star,
        theta=2.0 * beta_star,
        k=k,
    )
