import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sperturb.errors import BadN, DomainError
from sperturb.mesh import MeshKind, build_mesh, mesh_char, mesh_csv, uniform_mesh
from sperturb.problem import make_problem

KINDS = ["shishkin", "exp", "bs", "uniform"]
# node differences near -1 and 1 are exact only to the spacing of doubles there
ULP1 = 2 * np.spacing(1.0)


def test_shishkin_example():
    p = make_problem(1e-3, "one", "one")
    m = build_mesh("shishkin", 64, p)
    lam = min(4 * 1e-3 * math.log(64), 0.25)
    assert lam == pytest.approx(0.0166355, abs=1e-7)
    assert m.lam == pytest.approx(lam, rel=1e-14)
    np.testing.assert_allclose(m.h[:16], 1.03973e-3, rtol=1e-5)
    np.testing.assert_allclose(m.h[:16], 4 * 4 * 1e-3 * math.log(64) / 64, rtol=1e-12)


def test_uniform_four():
    p = make_problem(0.5, "one", "one")
    np.testing.assert_array_equal(build_mesh("uniform", 4, p).nodes, [-1, -0.5, 0, 0.5, 1])
    np.testing.assert_array_equal(uniform_mesh(4).nodes, [-1, -0.5, 0, 0.5, 1])


def test_exp_first_node():
    p = make_problem(1e-2, "one", "one")
    m = build_mesh("exp", 8, p)
    phi = -math.log(1 - 0.5 * (1 - 0.25))
    assert phi == pytest.approx(-math.log(5 / 8))
    assert phi == pytest.approx(0.470003, abs=1e-6)
    assert m.nodes[1] == pytest.approx(-1 + 1e-2 * 4 * phi, rel=1e-14)
    assert m.nodes[1] == pytest.approx(-0.9812, abs=1e-4)


@pytest.mark.parametrize("N", [6, 2, 0, 10, 7])
def test_bad_n(N):
    p = make_problem(0.1, "one", "one")
    with pytest.raises(BadN):
        build_mesh("shishkin", N, p)


def test_mesh_char_examples():
    phi, psi = mesh_char("shishkin", 16, 0.5)
    assert phi == pytest.approx(math.log(16)) and psi == pytest.approx(1 / 16)
    phi, psi = mesh_char("exp", 8, 0.5)
    assert phi == pytest.approx(math.log(4)) and psi == pytest.approx(0.25)
    for k in ("shishkin", "exp", "bs"):
        assert mesh_char(k, 64, 0.0) == (0.0, 1.0)
    with pytest.raises(DomainError):
        mesh_char("shishkin", 16, 0.6)


@pytest.mark.parametrize("kind", ["shishkin", "exp", "bs"])
@pytest.mark.parametrize("N", [16, 32, 64, 128, 256])
def test_phi_monotone(kind, N):
    t = np.linspace(0.0, 0.5, 1001)
    phi = np.array([mesh_char(kind, N, s)[0] for s in t])
    assert np.all(np.diff(phi) > 0)


def test_exp_element_lengths():
    for eps in (1e-2, 1e-4, 1e-6):
        for N in (16, 64, 256):
            p = make_problem(eps, "one", "one")
            m = build_mesh("exp", N, p)
            delta = (4.0 / N) * (1.0 - 2.0 / N)
            i = np.arange(1, N // 4 + 1)
            psi = 1.0 - 2.0 * (2.0 * (i - 1) / N) * (1.0 - 2.0 / N)
            h = eps * p.theta * np.log(psi / (psi - delta))
            np.testing.assert_allclose(m.h[: N // 4], h, rtol=1e-12, atol=ULP1)


def _runs(h, tol=1e-9):
    runs = 1
    for a, b in zip(h[:-1], h[1:]):
        if abs(a - b) > tol * max(abs(a), abs(b)) + ULP1:
            runs += 1
    return runs


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-8])
@pytest.mark.parametrize("N", [16, 64, 256])
def test_shishkin_structure(eps, N):
    p = make_problem(eps, "one", "one")
    m = build_mesh("shishkin", N, p)
    assert not m.fallback
    assert _runs(m.h) == 3
    q = N // 4
    fine = 4 * p.theta * eps * math.log(N) / N
    np.testing.assert_allclose(m.h[:q], fine, rtol=1e-12, atol=ULP1)
    np.testing.assert_allclose(m.h[3 * q:], fine, rtol=1e-12, atol=ULP1)
    coarse = m.h[q:3 * q]
    assert np.all(coarse >= 3.0 / N - 1e-15) and np.all(coarse <= 4.0 / N + 1e-15)


def test_fallback_three_patches():
    p = make_problem(0.5, "one", "one")
    m = build_mesh("shishkin", 64, p)
    assert m.fallback and m.lam == 0.25 and not m.layer_adapted
    np.testing.assert_allclose(m.h[:16], 1.0 / 64, rtol=1e-12)
    np.testing.assert_allclose(m.h[16:48], 3.0 / 64, rtol=1e-12)
    np.testing.assert_allclose(m.h[48:], 1.0 / 64, rtol=1e-12)


@given(
    kind=st.sampled_from(KINDS),
    N=st.integers(1, 256).map(lambda k: 4 * k),
    log_eps=st.floats(-10.0, 0.0),
)
def test_mesh_invariants(kind, N, log_eps):
    p = make_problem(10.0**log_eps, "one", "one")
    m = build_mesh(kind, N, p)
    x = m.nodes
    assert x[0] == -1.0 and x[-1] == 1.0 and x.size == N + 1
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(x + x[::-1], 0.0, atol=1e-14)
    np.testing.assert_array_equal(m.h, np.diff(x))
    assert abs(m.h.sum() - 2.0) <= 1e-13
    if kind != "uniform" and not m.fallback:
        lam = p.theta * p.epsilon * mesh_char(kind, N, 0.5)[0]
        assert m.lam == pytest.approx(lam, rel=1e-14)
        assert m.transition_points[1] == pytest.approx(1.0 - lam)


def test_mesh_csv():
    p = make_problem(1e-3, "one", "one")
    m = build_mesh("bs", 8, p)
    lines = mesh_csv(m).splitlines()
    assert lines[0] == "i,x_i,h_i"
    assert lines[1] == "0,-1,"
    assert len(lines) == 10
    i, x, h = lines[3].split(",")
    assert float(x) == m.nodes[2] and float(h) == m.h[1]


def test_kind_parse():
    assert MeshKind.parse("BS") is MeshKind.BAKHVALOV_SHISHKIN
    with pytest.raises(ValueError):
        MeshKind.parse("bakhvalov")
