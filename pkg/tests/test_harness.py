import json
import time

import numpy as np
import pytest

from sperturb.analysis.convergence import ConvergenceTable, ErrorRow
from sperturb.errors import BadN, EmptyTable, EpsilonOutOfRange, InsufficientData
from sperturb.harness.config import RunConfig
from sperturb.harness.nnsuite import relu_exp_audit, run_nn_suite, tanh_audit
from sperturb.harness.plotdata import emit_plotdata
from sperturb.harness.sweep import run_sweep, run_table

SMALL = dict(eps=(1e-2, 1e-4), mesh_kinds=("shishkin",), N=(16, 32, 64, 128))


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(**SMALL, seed=3, jobs=2)
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    back = RunConfig.load(path)
    assert back == cfg and back.to_json() == cfg.to_json()
    assert RunConfig().effective_oracle_N == 4096
    assert RunConfig(N=(512,)).effective_oracle_N == 8192


@pytest.mark.parametrize("bad, exc", [
    (dict(N=(18,)), BadN),
    (dict(eps=(0.0,)), EpsilonOutOfRange),
    (dict(eps=(1.5,)), EpsilonOutOfRange),
    (dict(mesh_kinds=("bakhvalov",)), ValueError),
    (dict(jobs=0), ValueError),
])
def test_config_validation(bad, exc):
    with pytest.raises(exc):
        RunConfig(**bad)


def test_config_unknown_key():
    with pytest.raises(ValueError):
        RunConfig.from_dict({"epsilon": [0.1]})


def test_small_sweep():
    t0 = time.perf_counter()
    table, report = run_sweep(RunConfig(**SMALL))
    assert time.perf_counter() - t0 < 10
    wc = report["err_energy"]["pair"]["shishkin"]["worst_case"]
    assert all(b < a for a, b in zip(wc[:-1], wc[1:]))
    flagged = {(r.epsilon, r.N) for r in table.rows if r.out_of_regime}
    assert flagged == {(1e-2, 128)}
    assert all(r.out_of_regime == (r.N * r.epsilon > 1) for r in table.rows)


def test_empty_n_list():
    with pytest.raises(InsufficientData):
        run_sweep(RunConfig(eps=(1e-2,), mesh_kinds=("shishkin",), N=()))


def test_sweep_deterministic_and_parallel(tmp_path):
    a = RunConfig(**SMALL, out_dir=str(tmp_path / "a"))
    b = a.with_overrides(out_dir=str(tmp_path / "b"), jobs=2)
    run_sweep(a, write=True)
    run_sweep(b, write=True)
    run_sweep(a, write=True)
    ca = (tmp_path / "a" / "convergence.csv").read_bytes()
    assert ca == (tmp_path / "b" / "convergence.csv").read_bytes()
    fits = json.loads((tmp_path / "a" / "fits.json").read_text())
    assert "err_energy" in fits["fits"] and fits["config"]["N"] == [16, 32, 64, 128]
    header = ca.decode().splitlines()[0]
    assert header.startswith("mesh,eps,N,err_energy,err_L2,err_H1,err_Linf")


def test_crash_isolation(monkeypatch):
    import sperturb.harness.sweep as sweep

    real = sweep.solve

    def flaky(problem, mesh, quad=None):
        if mesh.N == 32:
            raise RuntimeError("boom")
        return real(problem, mesh, quad)

    monkeypatch.setattr(sweep, "solve", flaky)
    table = run_table(RunConfig(**SMALL))
    bad = [r for r in table.rows if r.status != "ok"]
    assert len(bad) == 2 and all(r.N == 32 and "boom" in r.status for r in bad)
    assert len(table.rows) == 8
    assert all(np.isnan(r.err_energy) for r in bad)


def test_nn_suite_report():
    rep = run_nn_suite(RunConfig(eps=(1e-3,), mesh_kinds=("shishkin",), N=(128,)))
    case = rep["cpwl"][0]
    assert case["depth"] == 2 and case["size"] <= 3 * 128 and case["pass"]
    assert rep["tanh"]["value_err"] <= 1 / 3 + 1e-12
    assert all(v["slope"] < 0 for v in rep["relu_exp"].values())
    assert rep["pass"]


def test_tanh_and_exp_audits():
    t = tanh_audit()
    assert t["pass"] and t["arch_ok"]
    r = relu_exp_audit(eps_list=(1e-2,))
    assert r["0.01"]["pass"]


def _rows(n):
    return [ErrorRow("exp", e, N, 1.0 / N, 1.0 / N**2, 1.0, 0.1)
            for e, N in [(1e-2, 16), (1e-2, 32), (1e-3, 16), (1e-3, 32), (1e-4, 64)][:n]]


def test_plotdata_loglog(tmp_path):
    man = emit_plotdata(ConvergenceTable(_rows(3)), "loglog_err_vs_N", tmp_path)
    assert len(man["files"]) == 1
    lines = (tmp_path / man["files"][0]["file"]).read_text().splitlines()
    assert len(lines) == 3
    assert [float(v) for v in lines[0].split()][:2] == [16.0, 1e-3]
    disk = json.loads((tmp_path / "manifest_loglog_err_vs_N.json").read_text())
    assert disk == man and disk["files"][0]["rows"] == 3


def test_plotdata_robustness(tmp_path):
    man = emit_plotdata(ConvergenceTable(_rows(5)), "robustness_vs_eps", tmp_path)
    text = (tmp_path / man["files"][0]["file"]).read_text()
    blocks = text.strip("\n").split("\n\n")
    assert len(blocks) == 3 == man["files"][0]["blocks"]
    assert [len(b.splitlines()) for b in blocks] == [1, 2, 2]
    assert man["files"][0]["rows"] == 5


def test_plotdata_empty(tmp_path):
    with pytest.raises(EmptyTable):
        emit_plotdata(ConvergenceTable(), "loglog_err_vs_N", tmp_path)
    with pytest.raises(ValueError):
        emit_plotdata(ConvergenceTable(_rows(1)), "bars", tmp_path)
