"""The eleven acceptance checks, shared by the test suite and ``sperturb report``.

Each ``criterion_<k>()`` returns a CriterionResult whose ``line`` is a
one-line PASS/FAIL summary.  Sweeps are cached so the full suite solves each
cell once.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..analysis.convergence import ConvergenceTable, error_norms, fit_rates, measure_errors
from ..analysis.decomposition import decompose_const
from ..analysis.norms import norm_energy, norm_weighted_L2, weight_log
from ..analysis.reference import reference_for
from ..fem import hat, interpolant, ritz_energy, solve
from ..mesh import build_mesh
from ..problem import make_problem
from ..quadrature import composite_points, gauss_rule
from .nnsuite import cpwl_audit, relu_exp_audit, tanh_audit

SWEEP_EPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
SWEEP_N = (32, 64, 128, 256)
KINDS = ("shishkin", "exp", "bs", "uniform")
DATA = (("one", "one"), ("one", "poly2"))
DECOMP_EPS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
RATE_BAND = (-1.15, -0.90)
# the rate fits use the eps values for which every N of the sweep satisfies N <= 1/eps
FIT_REGIME = "block"


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.title}: {self.summary}"


@dataclass(frozen=True, eq=False)
class Cell:
    kind: str
    problem: object
    ref: object
    u_h: object
    row: object


def build_cells(b_id: str, f_id: str, kinds=KINDS) -> tuple:
    cells = []
    for eps in SWEEP_EPS:
        problem = make_problem(eps, b_id, f_id)
        ref = reference_for(problem)
        for kind in kinds:
            for N in SWEEP_N:
                u_h = solve(problem, build_mesh(kind, N, problem))
                cells.append(Cell(kind, problem, ref, u_h, measure_errors(problem, ref, u_h, kind)))
    return tuple(cells)


sweep = functools.lru_cache(maxsize=None)(build_cells)


def all_cells():
    return [c for b, f in DATA for c in sweep(b, f)]


def _table(cells, kind=None) -> ConvergenceTable:
    return ConvergenceTable([c.row for c in cells if kind is None or c.kind == kind])


def _fit(cells, kind, field_name="err_energy", regime=FIT_REGIME):
    return fit_rates(_table(cells, kind), field_name, regime)[kind]


def criterion_1() -> CriterionResult:
    t0 = time.perf_counter()
    cells = build_cells("one", "one", ("shishkin",))
    elapsed = time.perf_counter() - t0
    rep = _fit(cells, "shishkin")
    pair = _fit(cells, "shishkin", regime="pair")
    slope = rep["slope_logN_over_lnN"]
    spread = rep["normalized_spread"]
    ok = RATE_BAND[0] <= slope <= RATE_BAND[1] and spread <= 1.5 and elapsed < 30.0
    return CriterionResult(
        1, "Shishkin robust rate", ok,
        f"slope vs log(N/lnN) = {slope:.3f} in {RATE_BAND}, err*N/lnN spread = {spread:.3f} <= 1.5, "
        f"runtime {elapsed:.2f}s < 30s (per-pair-filter slope {pair['slope_logN_over_lnN']:.3f})",
        {"fit": rep, "pair_fit": pair, "runtime": elapsed},
    )


def criterion_2() -> CriterionResult:
    cells = sweep("one", "one")
    e = _fit(cells, "exp")["slope_logN"]
    b = _fit(cells, "bs")["slope_logN"]
    inband = lambda s: RATE_BAND[0] <= s <= RATE_BAND[1]
    ok = inband(e) and inband(b)
    return CriterionResult(
        2, "eXp / B-S robust rate", ok,
        f"eXp slope vs log N = {e:.3f}, B-S slope = {b:.3f}, band {RATE_BAND}",
        {"exp": e, "bs": b},
    )


def criterion_3() -> CriterionResult:
    cells = sweep("one", "one")
    u = _fit(cells, "uniform")
    s = _fit(cells, "shishkin")
    slope = u["slope_logN"]
    i256 = u["N"].index(256)
    ratio = u["worst_case"][i256] / s["worst_case"][s["N"].index(256)]
    ok = slope >= -0.65 and ratio >= 5.0
    return CriterionResult(
        3, "uniform mesh is not robust", ok,
        f"uniform slope = {slope:.3f} >= -0.65, err_uniform/err_shishkin at N=256 = {ratio:.1f} >= 5",
        {"slope": slope, "ratio": ratio},
    )


def criterion_4() -> CriterionResult:
    cells = sweep("one", "poly2")
    rep = _fit(cells, "shishkin", "err_L2")
    slope = rep["slope_logN_over_lnN"]
    ok = -2.2 <= slope <= -1.8
    return CriterionResult(
        4, "L2 rate, C2 data", ok,
        f"Shishkin L2 slope vs log(N/lnN) = {slope:.3f} in [-2.2, -1.8]", {"fit": rep},
    )


def criterion_5() -> CriterionResult:
    worst = {"rel_err": 0.0, "bc": 0.0, "gap": 0.0, "size_ratio": 0.0}
    failures = []
    for c in all_cells():
        a = cpwl_audit(c.problem, c.u_h, c.ref)
        worst["rel_err"] = max(worst["rel_err"], a["max_err"] / a["tol"] * 1e-12)
        worst["bc"] = max(worst["bc"], max(a["bc"]))
        worst["gap"] = max(worst["gap"], a["transfer_gap"])
        worst["size_ratio"] = max(worst["size_ratio"], a["size"] / a["N"])
        if not a["pass"]:
            failures.append((c.kind, c.problem.epsilon, a["N"]))
    ok = not failures
    return CriterionResult(
        5, "ReLU exactness", ok,
        f"{len(all_cells())} nets: max rel err {worst['rel_err']:.1e}, max |R(+-1)| {worst['bc']:.1e}, "
        f"max size/N {worst['size_ratio']:.2f}, max energy gap {worst['gap']:.1e}; failures {failures[:3]}",
        worst,
    )


def _decomp(eps, f_id):
    p = make_problem(eps, "one", f_id)
    ref = reference_for(p)
    return p, ref, decompose_const(p, ref)


def criterion_6() -> CriterionResult:
    grid = np.linspace(-1.0, 1.0, 2001)
    checks = {}

    # reconstruction and closed-form residual
    recon = resid = 0.0
    for f_id in ("one", "absx", "poly2"):
        for eps in DECOMP_EPS:
            p, ref, d = _decomp(eps, f_id)
            recon = max(recon, float(np.max(np.abs(d.total(grid)[0] - ref(grid)[0]))))
            x = np.linspace(-1.0, 1.0, 1001)
            r = -eps**2 * ref.d2(x) + p.b(x) * ref(x)[0] - p.f(x)
            fmax = float(np.max(np.abs(p.f(x))))
            resid = max(resid, float(np.max(np.abs(r))) / fmax)
    checks["recon"] = (recon, recon <= 1e-9)
    checks["residual"] = (resid, resid <= 1e-9)

    # remainder scaling, calibrated at the largest eps
    for f_id, k in (("absx", 1), ("poly2", 2)):
        vals = []
        for eps in DECOMP_EPS:
            p, ref, d = _decomp(eps, f_id)
            vals.append(norm_energy(p, d.uR, 64, ref.breakpoints) / eps**k)
        growth = max(vals) / vals[0]
        checks[f"uR_k{k}"] = (growth, growth <= 1.2)

    # weighted layer bound, both sides, b = f = 1
    wvals = {"plus": [], "minus": []}
    for eps in DECOMP_EPS:
        p, ref, d = _decomp(eps, "one")
        wvals["plus"].append(eps**2 * norm_weighted_L2(p, d.uBL_plus_d2, "plus"))
        wvals["minus"].append(eps**2 * norm_weighted_L2(p, d.uBL_minus_d2, "minus"))
    variation = max(max(v) / min(v) for v in wvals.values())
    nongrowth = max(max(v) / v[0] for v in wvals.values())
    checks["weighted"] = (variation, variation <= 2.0)

    # pointwise layer bound
    ptw = 0.0
    ok_ptw = True
    for f_id in ("one", "absx", "poly2"):
        for eps in SWEEP_EPS + DECOMP_EPS:
            p, ref, d = _decomp(eps, f_id)
            for side, part, end in (("minus", d.uBL_minus, -1.0), ("plus", d.uBL_plus, 1.0)):
                amp = abs(float(d.u0(np.array(end))[0])) + 1e-12
                bound = amp * np.exp(-weight_log(p, side, grid))
                v = np.abs(part(grid)[0])
                ok_ptw &= bool(np.all(v <= bound))
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.where(bound > 0, v / bound, 0.0)
                ptw = max(ptw, float(np.max(r)))
    checks["pointwise"] = (ptw, ok_ptw)

    ok = all(v[1] for v in checks.values())
    s = ", ".join(f"{k}={v[0]:.3g}{'' if v[1] else ' (FAIL)'}" for k, v in checks.items())
    return CriterionResult(
        6, "decomposition", ok,
        s + f"; weighted max/first = {nongrowth:.3g}",
        {"checks": checks, "weighted_values": wvals},
    )


def criterion_7() -> CriterionResult:
    a = tanh_audit()
    return CriterionResult(
        7, "tanh layer net", a["arch_ok"] and a["value_ok"] and a["deriv_ok"],
        f"depth {a['depth']}, size {a['size']}, sup err {a['sup_value_err']:.4f}, "
        f"sup deriv err {a['sup_deriv_err']:.4f} <= e^-1 = {a['bound']:.4f}",
        a,
    )


def criterion_8() -> CriterionResult:
    a = relu_exp_audit()
    ok = all(v["pass"] for v in a.values())
    s = "; ".join(
        f"eps={k}: slope {v['slope']:.3f} < -0.15, R2 {v['r2']:.3f} >= 0.9, "
        f"M <= {v['C']:.1f} p^2 {'ok' if v['size_ok'] else 'violated'}"
        for k, v in a.items())
    return CriterionResult(8, "deep ReLU exponential", ok, s, a)


def _fd_gradient(problem, u_h, h=1e-4) -> float:
    worst = 0.0
    base = u_h.coeffs
    for j in range(1, u_h.mesh.N):
        phi = hat(u_h.mesh, j).coeffs
        plus = type(u_h)(u_h.mesh, base + h * phi)
        minus = type(u_h)(u_h.mesh, base - h * phi)
        g = (ritz_energy(problem, plus) - ritz_energy(problem, minus)) / (2.0 * h)
        worst = max(worst, abs(g))
    return worst


def criterion_9() -> CriterionResult:
    worst_ratio = 0.0
    worst_gap = -math.inf
    ok = True
    for c in all_cells():
        fmax = float(np.max(np.abs(c.problem.f(np.linspace(-1, 1, 1001)))))
        g = _fd_gradient(c.problem, c.u_h)
        worst_ratio = max(worst_ratio, g / fmax)
        r_h = ritz_energy(c.problem, c.u_h)
        r_i = ritz_energy(c.problem, interpolant(c.u_h.mesh, c.ref))
        # a few ulps of slack for the floating-point evaluation of R itself
        slack = 1e-14 * max(1.0, abs(r_i))
        worst_gap = max(worst_gap, r_h - r_i)
        ok &= g <= 1e-6 * fmax and r_h <= r_i + slack
    return CriterionResult(
        9, "Ritz consistency", ok,
        f"max |dR/dphi_j| / ||f||_inf = {worst_ratio:.1e} <= 1e-6, "
        f"max R(u_h) - R(I u) = {worst_gap:.2e} <= 0",
        {"grad_ratio": worst_ratio, "gap": worst_gap},
    )


def _energy_norm_fe(problem, u_h) -> float:
    x, w = composite_points(u_h.mesh.nodes, gauss_rule(10))
    v, d = u_h(x)
    return math.sqrt(float(np.sum(w * (problem.epsilon**2 * d * d + problem.b(x) * v * v))))


def _f_l2(problem) -> float:
    x, w = composite_points(np.linspace(-1.0, 1.0, 65), gauss_rule(10))
    return math.sqrt(float(np.sum(w * problem.f(x) ** 2)))


def criterion_10() -> CriterionResult:
    worst = 0.0
    for c in all_cells():
        bound = _f_l2(c.problem) / math.sqrt(c.problem.b_lower)
        worst = max(worst, _energy_norm_fe(c.problem, c.u_h) / bound)
    ok = worst <= 1.0 + 1e-6
    return CriterionResult(
        10, "energy a-priori bound", ok,
        f"max ||u_h||_(1,eps) / (||f||/sqrt(b_lower)) = {worst:.6f} <= 1 + 1e-6", {"ratio": worst},
    )


def criterion_11() -> CriterionResult:
    worst = 0.0
    n = 0
    for c in all_cells():
        if c.ref.kind != "ClosedFormConstB":
            continue
        n += 1
        iu = interpolant(c.u_h.mesh, c.ref)
        e_i = error_norms(c.problem, c.ref, iu, c.u_h.mesh)["err_energy"]
        worst = max(worst, c.row.err_energy / e_i)
    ok = n > 0 and worst <= 1.0 + 1e-6
    return CriterionResult(
        11, "quasi-optimality", ok,
        f"max Galerkin / interpolant energy error over {n} cells = {worst:.6f} <= 1 + 1e-6",
        {"ratio": worst, "cells": n},
    )


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_all(only=None) -> list:
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        out.append(fn())
    return out
