"""Audits of the network constructions against their contracts."""

from __future__ import annotations

import math

import numpy as np

from ..analysis.convergence import error_norms, lsq_fit
from ..analysis.reference import reference_for
from ..fem import FeSolution, solve
from ..mesh import build_mesh
from ..nn.cpwl import cpwl_to_relu
from ..nn.gadgets import relu_exp_net
from ..nn.layers import tanh_layer_net, tanh_template_net
from ..nn.net import realize, realize_d1
from ..problem import Problem, make_problem
from .config import RunConfig

EXACT_TOL = 1e-12
TRANSFER_TOL = 1e-10
TANH_BOUND = math.exp(-1.0)
EXP_P_RANGE = tuple(range(4, 21))
EXP_EPS = (1e-1, 1e-2)


def net_as_function(net):
    def f(x):
        return realize(net, x), realize_d1(net, x)
    return f


def cpwl_audit(problem: Problem, u_h: FeSolution, ref=None, n_samples: int = 10_000,
               seed: int = 0) -> dict:
    """Exactness, architecture, boundary values and energy transfer of the CpwL net."""
    net = cpwl_to_relu(u_h)
    N = u_h.mesh.N
    x = np.linspace(-1.0, 1.0, n_samples)
    scale = 1.0 + float(np.max(np.abs(u_h.coeffs)))
    max_err = float(np.max(np.abs(realize(net, x) - u_h(x)[0])))
    bc = (abs(float(realize(net, -1.0))), abs(float(realize(net, 1.0))))

    # slopes at random points strictly inside elements
    rng = np.random.default_rng(seed)
    j = rng.integers(0, N, size=1000)
    t = rng.uniform(0.05, 0.95, size=1000)
    xs = u_h.nodes[j] + t * u_h.mesh.h[j]
    slopes = u_h.slopes
    d_err = float(np.max(np.abs(realize_d1(net, xs) - slopes[j])))
    d_tol = 1e-9 * (1.0 + float(np.max(np.abs(slopes))))

    out = {
        "N": N,
        "depth": net.depth,
        "width": net.width,
        "size": net.size,
        "max_err": max_err,
        "tol": EXACT_TOL * scale,
        "bc": bc,
        "slope_err": d_err,
        "exact": max_err <= EXACT_TOL * scale,
        "depth_ok": net.depth == 2,
        "width_ok": net.width <= N + 1,
        "size_ok": net.size <= 3 * N,
        "bc_ok": (not u_h.bc_respected) or max(bc) <= EXACT_TOL,
        "slope_ok": d_err <= d_tol,
    }
    if ref is not None:
        e_net = error_norms(problem, ref, net_as_function(net), u_h.mesh)["err_energy"]
        e_fe = error_norms(problem, ref, u_h, u_h.mesh)["err_energy"]
        out["energy_err_net"] = e_net
        out["energy_err_fe"] = e_fe
        out["transfer_gap"] = abs(e_net - e_fe)
        out["transfer_ok"] = abs(e_net - e_fe) <= TRANSFER_TOL
    out["pass"] = all(v for k, v in out.items() if k.endswith("_ok") or k == "exact")
    return out


def tanh_audit(n_grid: int = 100_000, y_max: float = 50.0) -> dict:
    """Sup errors of the template in y >= 0: grid on [0, y_max] plus the tail bound.

    For y > y_max, 0 < R(y) < e^-y and 0 < -R'(y) < e^-y, so both errors are
    below e^-y_max there.
    """
    net = tanh_template_net()
    y = np.linspace(0.0, y_max, n_grid)
    ex = np.exp(-y)
    v_err = float(np.max(np.abs(realize(net, y) - ex)))
    d_err = float(np.max(np.abs(realize_d1(net, y) + ex)))
    tail = math.exp(-y_max)
    far = {}
    for eps in (1e-1, 1e-2, 1e-3):
        for side, x_far in (("plus", -1.0), ("minus", 1.0)):
            far[f"{side}:{eps:g}"] = abs(float(realize(tanh_layer_net(side, eps, 1.0), x_far)))
    sup_v = max(v_err, tail)
    sup_d = max(d_err, tail)
    out = {
        "depth": net.depth,
        "size": net.size,
        "value_err": v_err,
        "deriv_err": d_err,
        "tail_bound": tail,
        "sup_value_err": sup_v,
        "sup_deriv_err": sup_d,
        "bound": TANH_BOUND,
        "far_endpoint": far,
        "arch_ok": net.depth == 2 and net.size == 4,
        "value_ok": sup_v <= TANH_BOUND,
        "deriv_ok": sup_d <= TANH_BOUND,
        "third_ok": v_err <= 1.0 / 3.0 + 1e-12,
        "far_ok": far["plus:0.001"] <= 1e-8 and far["minus:0.001"] <= 1e-8,
    }
    out["pass"] = all(v for k, v in out.items() if k.endswith("_ok"))
    return out


def relu_exp_audit(eps_list=EXP_EPS, p_range=EXP_P_RANGE, n_grid: int = 4001,
                   b_const: float = 1.0, side: str = "plus") -> dict:
    """Decay of the sup error in p and the size audit M(p) <= C p^2, C = M(p0)/p0^2."""
    x = np.linspace(-1.0, 1.0, n_grid)
    out = {}
    for eps in eps_list:
        d = (1.0 - x) if side == "plus" else (1.0 + x)
        exact = np.exp(-math.sqrt(b_const) * d / eps)
        errs, sizes, depths = [], [], []
        for p in p_range:
            net = relu_exp_net(p, eps, side, b_const)
            errs.append(float(np.max(np.abs(realize(net, x) - exact))))
            sizes.append(net.size)
            depths.append(net.depth)
        fit = lsq_fit(np.array(p_range, dtype=float), np.log(errs))
        C = sizes[0] / p_range[0] ** 2
        size_ok = all(M <= C * p * p for M, p in zip(sizes, p_range))
        out[f"{eps:g}"] = {
            "eps": eps,
            "p": list(p_range),
            "sup_err": errs,
            "size": sizes,
            "depth": depths,
            "slope": fit.slope,
            "r2": fit.r2,
            "C": C,
            "slope_ok": fit.slope < -0.15,
            "r2_ok": fit.r2 >= 0.9,
            "size_ok": size_ok,
            "pass": fit.slope < -0.15 and fit.r2 >= 0.9 and size_ok,
        }
    return out


def run_nn_suite(cfg: RunConfig) -> dict:
    cases = []
    for eps in cfg.eps:
        problem = make_problem(eps, cfg.b_id, cfg.f_id)
        ref = reference_for(problem, cfg.effective_oracle_N)
        for kind in cfg.mesh_kinds:
            for N in cfg.N:
                try:
                    u_h = solve(problem, build_mesh(kind, N, problem))
                    a = cpwl_audit(problem, u_h, ref, seed=cfg.seed)
                except Exception as exc:
                    a = {"N": N, "pass": False, "error": str(exc)}
                a.update(mesh=kind, eps=eps)
                cases.append(a)
    tanh = tanh_audit()
    rexp = relu_exp_audit()
    passed = all(c["pass"] for c in cases) and tanh["pass"] and all(v["pass"] for v in rexp.values())
    return {"cpwl": cases, "tanh": tanh, "relu_exp": rexp, "pass": passed}
