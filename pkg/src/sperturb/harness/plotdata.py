"""Whitespace-separated data files for external plotting tools (gnuplot etc.)."""

from __future__ import annotations

import json
import os

from ..analysis.convergence import ConvergenceTable
from ..errors import EmptyTable

STYLES = ("loglog_err_vs_N", "robustness_vs_eps")
_COLS = "N eps err_energy err_L2 err_H1semi err_Linf"


def _line(r) -> str:
    return " ".join([str(r.N), repr(r.epsilon), repr(r.err_energy), repr(r.err_L2),
                     repr(r.err_H1semi), repr(r.err_Linf)])


def emit_plotdata(table: ConvergenceTable, style: str, out_dir) -> dict:
    """Write data files plus ``manifest_<style>.json``; returns the manifest.

    ``loglog_err_vs_N`` writes one file per mesh kind, rows ordered by
    (eps, N).  ``robustness_vs_eps`` writes one file per mesh kind with one
    block per eps, blocks separated by a blank line.  Files hold data lines
    only; the column names are listed in the manifest.
    """
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")
    rows = [r for r in table.sorted().rows if r.status == "ok"]
    if not rows:
        raise EmptyTable("no successful rows to plot")
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for kind in sorted({r.mesh_kind for r in rows}):
        sel = [r for r in rows if r.mesh_kind == kind]
        name = f"{style}_{kind}.dat"
        lines = []
        if style == "loglog_err_vs_N":
            lines += [_line(r) for r in sel]
            blocks = 1
        else:
            eps_values = sorted({r.epsilon for r in sel})
            for i, e in enumerate(eps_values):
                if i:
                    lines.append("")
                lines += [_line(r) for r in sel if r.epsilon == e]
            blocks = len(eps_values)
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        files.append({"file": name, "mesh": kind, "rows": len(sel), "blocks": blocks})
    manifest = {"style": style, "columns": _COLS.split(), "files": files}
    with open(os.path.join(out_dir, f"manifest_{style}.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
