"""Error tables and least-squares rate fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from ..errors import InsufficientData
from ..fem import FeSolution
from ..problem import Problem
from ..quadrature import composite_points, gauss_rule
from .norms import NORM_ORDER, layer_panels
from .reference import ReferenceSolution

ERROR_FIELDS = ("err_energy", "err_L2", "err_H1semi", "err_Linf")


@dataclass(frozen=True)
class ErrorRow:
    mesh_kind: str
    epsilon: float
    N: int
    err_energy: float
    err_L2: float
    err_H1semi: float
    err_Linf: float
    # theta*eps*phi(1/2) < 1/4, i.e. the mesh really resolves the layer
    layer_adapted: bool = True
    out_of_regime: bool = False
    status: str = "ok"

    @property
    def key(self):
        return (self.mesh_kind, self.epsilon, self.N)

    def to_dict(self):
        return asdict(self)


def failed_row(mesh_kind: str, epsilon: float, N: int, message: str) -> ErrorRow:
    nan = float("nan")
    return ErrorRow(mesh_kind, epsilon, N, nan, nan, nan, nan, False, N * epsilon > 1.0,
                    f"error: {message}")


def error_norms(problem: Problem, ref: ReferenceSolution, approx, mesh) -> dict:
    """Energy, L2, H1-seminorm and sup errors of ref - approx.

    ``approx`` maps x to (value, derivative).  Panels follow ``mesh`` with
    layer refinement; the sup error is taken over the quadrature points and
    the mesh nodes.
    """
    edges = layer_panels(problem, mesh, ref.breakpoints)
    x, w = composite_points(edges, gauss_rule(NORM_ORDER))
    rv, rd = ref(x)
    hv, hd = approx(x)
    ev, ed = rv - hv, rd - hd
    l2sq = float(np.sum(w * ev * ev))
    h1sq = float(np.sum(w * ed * ed))
    bsq = float(np.sum(w * problem.b(x) * ev * ev))
    node_err = np.abs(ref(mesh.nodes)[0] - approx(mesh.nodes)[0])
    return {
        "err_energy": math.sqrt(problem.epsilon**2 * h1sq + bsq),
        "err_L2": math.sqrt(l2sq),
        "err_H1semi": math.sqrt(h1sq),
        "err_Linf": float(max(np.max(np.abs(ev)), np.max(node_err))),
    }


def measure_errors(problem: Problem, ref: ReferenceSolution, u_h: FeSolution,
                   mesh_kind: Optional[str] = None) -> ErrorRow:
    mesh = u_h.mesh
    errs = error_norms(problem, ref, u_h, mesh)
    kind = mesh_kind if mesh_kind is not None else (
        mesh.kind.value if mesh.kind is not None else "custom")
    adapted = mesh.layer_adapted or kind == "uniform"
    return ErrorRow(kind, problem.epsilon, mesh.N, errs["err_energy"], errs["err_L2"],
                    errs["err_H1semi"], errs["err_Linf"], adapted,
                    mesh.N * problem.epsilon > 1.0)


@dataclass
class ConvergenceTable:
    rows: list = field(default_factory=list)

    def add(self, row: ErrorRow):
        if any(r.key == row.key for r in self.rows):
            raise ValueError(f"duplicate row {row.key}")
        self.rows.append(row)

    def sorted(self) -> "ConvergenceTable":
        return ConvergenceTable(sorted(self.rows, key=lambda r: r.key))

    def kinds(self) -> list:
        return sorted({r.mesh_kind for r in self.rows})

    def select(self, kind: str) -> list:
        return [r for r in self.rows if r.mesh_kind == kind]

    def to_csv(self) -> str:
        lines = ["mesh,eps,N,err_energy,err_L2,err_H1,err_Linf,out_of_regime,status"]
        for r in self.sorted().rows:
            lines.append(",".join([
                r.mesh_kind, repr(r.epsilon), str(r.N), repr(r.err_energy), repr(r.err_L2),
                repr(r.err_H1semi), repr(r.err_Linf), str(r.out_of_regime).lower(), r.status,
            ]))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RateFit:
    slope: float
    constant: float
    n_points: int
    r2: float


def lsq_fit(xs, ys) -> RateFit:
    """Least-squares line ys ~ slope*xs + log(constant)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ np.array([slope, icpt])
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum((ys - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(math.exp(icpt)), len(xs), r2)


def worst_case(rows, field_name: str = "err_energy", regime: str = "pair") -> dict:
    """Max over eps of the error at each N, restricted to the regime N <= 1/eps.

    ``regime='pair'`` keeps every (eps, N) with N <= 1/eps; ``regime='block'``
    keeps only the eps values for which every N in the table satisfies it.
    Failed cells and meshes in the lambda = 1/4 branch are skipped.
    """
    good = [r for r in rows if r.status == "ok" and r.layer_adapted]
    if regime == "block" and good:
        nmax = max(r.N for r in good)
        good = [r for r in good if nmax * r.epsilon <= 1.0]
    elif regime == "pair":
        good = [r for r in good if not r.out_of_regime]
    elif regime != "all":
        raise ValueError(f"unknown regime {regime!r}")
    out = {}
    for r in good:
        v = getattr(r, field_name)
        if r.N not in out or v > out[r.N][0]:
            out[r.N] = (v, r.epsilon)
    return dict(sorted(out.items()))


def fit_slopes(Ns, errs, drop_smallest: bool = True) -> dict:
    """Slopes of log err against log N and log(N/ln N)."""
    Ns = np.asarray(Ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if Ns.size < 3:
        raise InsufficientData(f"need at least 3 N values, got {Ns.size}")
    if drop_smallest and Ns.size >= 4:
        Ns, errs = Ns[1:], errs[1:]
    ly = np.log(errs)
    return {
        "vs_logN": lsq_fit(np.log(Ns), ly),
        "vs_logN_over_lnN": lsq_fit(np.log(Ns / np.log(Ns)), ly),
    }


def fit_rates(table: ConvergenceTable, field_name: str = "err_energy",
              regime: str = "pair", drop_smallest: bool = True) -> dict:
    """Per mesh kind: fitted slopes on worst-case-over-eps errors and robustness report."""
    if not table.rows:
        raise InsufficientData("empty convergence table")
    report = {}
    for kind in table.kinds():
        rows = table.select(kind)
        wc = worst_case(rows, field_name, regime)
        if len(wc) < 3:
            raise InsufficientData(f"{kind}: need at least 3 N values, got {len(wc)}")
        Ns = list(wc)
        errs = [wc[n][0] for n in Ns]
        fits = fit_slopes(Ns, errs, drop_smallest)
        # robustness: spread over eps of err*N/lnN at each N
        spread = {}
        for n in Ns:
            vals = [getattr(r, field_name) * n / math.log(n) for r in rows
                    if r.N == n and r.status == "ok" and not r.out_of_regime]
            if vals:
                spread[n] = {"max": max(vals), "min": min(vals), "ratio": max(vals) / min(vals)}
        normalized = [e * n / math.log(n) for n, e in zip(Ns, errs)]
        report[kind] = {
            "N": Ns,
            "worst_case": errs,
            "worst_eps": [wc[n][1] for n in Ns],
            "slope_logN": fits["vs_logN"].slope,
            "const_logN": fits["vs_logN"].constant,
            "slope_logN_over_lnN": fits["vs_logN_over_lnN"].slope,
            "const_logN_over_lnN": fits["vs_logN_over_lnN"].constant,
            "normalized_const": normalized,
            "normalized_spread": max(normalized) / min(normalized),
            "robustness": spread,
        }
    return report
