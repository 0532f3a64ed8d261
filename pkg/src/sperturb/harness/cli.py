"""Command-line front end: ``sperturb <subcommand> ...``.

Exit codes: 0 when everything checked passes, 2 when an acceptance or
verification check fails, 1 on errors.  The log level comes from the
SPERTURB_LOG environment variable (error, info or debug; default error).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from ..analysis.decomposition import decompose_const
from ..analysis.reference import reference_for
from ..errors import ParseError
from ..fem import solve
from ..mesh import build_mesh, mesh_csv
from ..nn.cpwl import cpwl_to_relu
from ..nn.io import nn_export, nn_import
from ..nn.net import realize
from ..problem import make_problem
from .config import RunConfig
from .plotdata import STYLES, emit_plotdata
from .sweep import run_sweep

log = logging.getLogger("sperturb")

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
KIND_CHOICES = ("shishkin", "exp", "bs", "uniform")
DECOMP_GRID = 2001


def _setup_logging():
    level = os.environ.get("SPERTURB_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _write_json(path, obj):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_xy_csv(path):
    """Read a two-column CSV with a header line; returns (x, y) arrays."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    try:
        data = np.array([[float(v) for v in ln.split(",")[:2]] for ln in lines[1:]])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
        raise ParseError(f"{path}: expected at least two rows of x,y")
    return data[:, 0], data[:, 1]


def _xy_csv(header, x, *cols) -> str:
    lines = [header]
    for row in zip(x, *cols):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    over = {
        "eps": getattr(args, "eps_list", None),
        "N": getattr(args, "N_list", None),
        "mesh_kinds": getattr(args, "mesh_list", None),
        "b_id": getattr(args, "b", None),
        "f_id": getattr(args, "f", None),
        "jobs": args.jobs,
        "out_dir": args.out_dir,
        "seed": getattr(args, "seed", None),
    }
    return cfg.with_overrides(**over)


def _out(args, name):
    return os.path.join(args.out_dir or "out", name)


# subcommands --------------------------------------------------------------

def cmd_solve(args) -> int:
    problem = make_problem(args.eps, args.b, args.f)
    u_h = solve(problem, build_mesh(args.mesh, args.N, problem))
    path = args.out or _out(args, "sol.csv")
    _write_text(path, _xy_csv("x,u", u_h.nodes, u_h.coeffs))
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_mesh(args) -> int:
    problem = make_problem(args.eps, args.b, args.f)
    _write_text(args.out, mesh_csv(build_mesh(args.kind, args.N, problem)))
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _config(args)
    table, report = run_sweep(cfg, write=True)
    for style in args.plot or ():
        emit_plotdata(table, style, cfg.out_dir)
    failed = [r for r in table.rows if r.status != "ok"]
    print(f"{len(table.rows)} rows ({len(failed)} failed) -> {cfg.out_dir}")
    for kind, fit in report["err_energy"]["pair"].items():
        print(f"  {kind:9s} energy slope vs log N = {fit['slope_logN']:.3f}, "
              f"vs log(N/lnN) = {fit['slope_logN_over_lnN']:.3f}")
    return EXIT_FAIL if failed else EXIT_OK


def decomposition_csv(problem, n: int = DECOMP_GRID) -> str:
    dec = decompose_const(problem, reference_for(problem))
    x = np.linspace(-1.0, 1.0, n)
    cols = [dec.parts()[k](x)[0] for k in ("u0", "uBL_minus", "uBL_plus", "uR")]
    return _xy_csv("x,u0,uBL_minus,uBL_plus,uR", x, *cols)


def cmd_decompose(args) -> int:
    problem = make_problem(args.eps, args.b, args.f)
    path = args.out or _out(args, "decomposition.csv")
    _write_text(path, decomposition_csv(problem))
    return EXIT_OK


def cmd_nn_export(args) -> int:
    x, u = read_xy_csv(getattr(args, "from"))
    nn_export(cpwl_to_relu(x, u), args.out)
    return EXIT_OK


def cmd_nn_eval(args) -> int:
    net = nn_import(args.net)
    x = np.linspace(-1.0, 1.0, args.grid)
    _write_text(args.out, _xy_csv("x,y", x, realize(net, x)))
    return EXIT_OK


def cmd_nn_verify(args) -> int:
    """Compare the net with the CpwL interpolant of the CSV at nodes and midpoints."""
    net = nn_import(args.net)
    x, u = read_xy_csv(args.against)
    pts = np.sort(np.concatenate([x, 0.5 * (x[1:] + x[:-1])]))
    err = float(np.max(np.abs(realize(net, pts) - np.interp(pts, x, u))))
    tol = args.tol * (1.0 + float(np.max(np.abs(u))))
    ok = err <= tol
    print(f"[{'PASS' if ok else 'FAIL'}] max |net - u| = {err:.3e} (tol {tol:.3e}) at {pts.size} points")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_nn_suite(args) -> int:
    from .nnsuite import run_nn_suite
    cfg = _config(args)
    report = run_nn_suite(cfg)
    path = os.path.join(cfg.out_dir, "nn_suite.json")
    _write_json(path, report)
    bad = [c for c in report["cpwl"] if not c["pass"]]
    print(f"cpwl: {len(report['cpwl']) - len(bad)}/{len(report['cpwl'])} pass; "
          f"tanh: {'pass' if report['tanh']['pass'] else 'FAIL'}; "
          f"relu_exp: {'pass' if all(v['pass'] for v in report['relu_exp'].values()) else 'FAIL'}")
    print(f"report -> {path}")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_report(args) -> int:
    from .acceptance import run_all
    results = run_all(set(args.only) if args.only else None)
    for r in results:
        print(r.line, flush=True)
    path = os.path.join(args.out_dir or "out", "acceptance.json")
    _write_json(path, [{"criterion": r.number, "title": r.title, "passed": r.passed,
                        "summary": r.summary, "details": r.details} for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# parser -------------------------------------------------------------------

def _positive_float(text):
    v = float(text)
    if not math.isfinite(v) or v <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for failed checks."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="RunConfig JSON file")
    common.add_argument("--out-dir", dest="out_dir", help="output directory (default: out)")
    common.add_argument("--jobs", type=int, help="parallel worker processes")

    single = argparse.ArgumentParser(add_help=False)
    single.add_argument("--eps", type=_positive_float, default=1e-4)
    single.add_argument("--b", default="one", help="reaction coefficient registry id")
    single.add_argument("--f", default="one", help="load registry id")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--eps", dest="eps_list", type=_positive_float, nargs="+")
    sweep.add_argument("--N", dest="N_list", type=int, nargs="+")
    sweep.add_argument("--mesh", dest="mesh_list", choices=KIND_CHOICES, nargs="+")
    sweep.add_argument("--b")
    sweep.add_argument("--f")
    sweep.add_argument("--seed", type=int)

    p = _Parser(prog="sperturb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common, single], help="P1 Galerkin solve, CSV x,u")
    s.add_argument("--N", type=int, default=64)
    s.add_argument("--mesh", choices=KIND_CHOICES, default="shishkin")
    s.add_argument("--out", help="CSV path (default: <out-dir>/sol.csv; '-' for stdout)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("mesh", help="mesh utilities")
    msub = s.add_subparsers(dest="action", required=True)
    d = msub.add_parser("dump", parents=[common, single], help="nodes as CSV i,x_i,h_i")
    d.add_argument("--kind", choices=KIND_CHOICES, default="shishkin")
    d.add_argument("--N", type=int, default=64)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_mesh)

    s = sub.add_parser("converge", parents=[common, sweep], help="eps x N sweep, CSV + JSON fits")
    s.add_argument("--plot", choices=STYLES, nargs="*", help="also emit plot data")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("decompose", parents=[common, single], help="solution parts on a 2001-point grid")
    s.add_argument("--out", help="CSV path (default: <out-dir>/decomposition.csv)")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("nn-export", parents=[common], help="CpwL solution CSV to ReLU net file")
    s.add_argument("--from", required=True, help="CSV x,u written by solve")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_nn_export)

    s = sub.add_parser("nn-eval", parents=[common], help="evaluate a net on a uniform grid")
    s.add_argument("--net", required=True)
    s.add_argument("--grid", type=int, default=10001)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_nn_eval)

    s = sub.add_parser("nn-verify", parents=[common], help="check a net against a solution CSV")
    s.add_argument("--net", required=True)
    s.add_argument("--against", required=True)
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_nn_verify)

    s = sub.add_parser("nn-suite", parents=[common, sweep], help="network audits, JSON report")
    s.set_defaults(func=cmd_nn_suite)

    s = sub.add_parser("report", parents=[common], help="run the acceptance criteria")
    s.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # report and map to exit code 1
        log.debug("failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
