"""epsilon x N x mesh-kind sweeps."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor

from ..errors import InsufficientData
from ..analysis.convergence import ConvergenceTable, failed_row, fit_rates, measure_errors
from ..analysis.reference import reference_for
from ..fem import solve
from ..mesh import build_mesh
from ..problem import make_problem
from ..quadrature import gauss_rule
from .config import RunConfig

log = logging.getLogger(__name__)


def _eps_task(args):
    """All cells sharing one epsilon; the reference is built once per task."""
    eps, cfg = args
    rows = []
    try:
        problem = make_problem(eps, cfg.b_id, cfg.f_id)
        ref = reference_for(problem, cfg.effective_oracle_N)
    except Exception as exc:  # the whole eps block fails, other blocks go on
        log.error("eps=%g: reference failed: %s", eps, exc)
        return [failed_row(k, eps, n, str(exc)) for k in cfg.mesh_kinds for n in cfg.N]
    quad = gauss_rule(cfg.quad_order)
    for kind in cfg.mesh_kinds:
        for N in cfg.N:
            try:
                mesh = build_mesh(kind, N, problem)
                u_h = solve(problem, mesh, quad)
                rows.append(measure_errors(problem, ref, u_h, kind))
            except Exception as exc:
                log.error("cell (%s, %g, %d) failed: %s", kind, eps, N, exc)
                rows.append(failed_row(kind, eps, N, str(exc)))
    return rows


def run_table(cfg: RunConfig) -> ConvergenceTable:
    tasks = [(e, cfg) for e in cfg.eps]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_eps_task, tasks))
    else:
        results = [_eps_task(t) for t in tasks]
    table = ConvergenceTable()
    for rows in results:
        for r in rows:
            table.add(r)
    return table.sorted()


def fits_report(table: ConvergenceTable) -> dict:
    """Energy and L2 fits under both regime filters.

    The per-pair fit must succeed (InsufficientData propagates); the block
    filter may leave too few N values, which is recorded instead.
    """
    report = {}
    for field_name in ("err_energy", "err_L2"):
        entry = {"pair": fit_rates(table, field_name, "pair")}
        try:
            entry["block"] = fit_rates(table, field_name, "block")
        except InsufficientData as exc:
            entry["block"] = {"error": str(exc)}
        report[field_name] = entry
    return report


def write_outputs(cfg: RunConfig, table: ConvergenceTable, report: dict, out_dir=None) -> dict:
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "convergence.csv")
    json_path = os.path.join(out_dir, "fits.json")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(table.to_csv())
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump({"config": cfg.to_dict(), "fits": report}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"csv": csv_path, "json": json_path}


def run_sweep(cfg: RunConfig, write: bool = False):
    """Solve every cell, measure errors and fit rates.

    Returns ``(table, report)``.  Failed cells appear in the table with a
    status message and NaN errors; they are excluded from the fits.
    Raises InsufficientData when fewer than three N values are available.
    """
    table = run_table(cfg)
    try:
        report = fits_report(table)
    finally:
        if write:
            # flush the table even when fitting fails
            os.makedirs(cfg.out_dir, exist_ok=True)
            with open(os.path.join(cfg.out_dir, "convergence.csv"), "w", encoding="utf-8") as fh:
                fh.write(table.to_csv())
    if write:
        write_outputs(cfg, table, report)
    return table, report
