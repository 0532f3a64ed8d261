import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sperturb.analysis.norms import norm_energy
from sperturb.analysis.reference import closed_form_const
from sperturb.fem import (FeSolution, assemble, eval_fe, hat, interpolant, ritz_energy, solve,
                          thomas_solve, tridiag_matvec)
from sperturb.mesh import build_mesh, mesh_from_nodes, uniform_mesh
from sperturb.problem import make_problem
from sperturb.quadrature import composite_points, gauss_rule


@pytest.mark.parametrize("order", range(1, 11))
def test_gauss_rule_weights_and_exactness(order):
    rule = gauss_rule(order)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-15)
    for deg in range(2 * order):
        assert np.dot(rule.weights, rule.points**deg) == pytest.approx(1.0 / (deg + 1), rel=1e-13)


@given(coef=st.lists(st.floats(-5, 5), min_size=1, max_size=10), order=st.integers(5, 8))
def test_composite_rule_polynomials(coef, order):
    # exact for degree <= 9 on every panel, so on any partition
    p = np.polynomial.Polynomial(coef)
    edges = np.array([-1.0, -0.3, 0.1, 0.75, 1.0])
    x, w = composite_points(edges, gauss_rule(order))
    exact = p.integ()(1.0) - p.integ()(-1.0)
    assert np.sum(w * p(x)) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_assemble_uniform_example():
    p = make_problem(1.0, "one", "one")
    (lo, d, up), load = assemble(p, uniform_mesh(4))
    np.testing.assert_allclose(d, 4 + 1 / 3, rtol=1e-14)
    np.testing.assert_allclose(lo, -2 + 1 / 12, rtol=1e-14)
    np.testing.assert_allclose(up, -2 + 1 / 12, rtol=1e-14)
    np.testing.assert_allclose(load, 0.5, rtol=1e-14)


def test_assemble_zero_load():
    p = make_problem(0.1, "one", "zero")
    _, load = assemble(p, build_mesh("shishkin", 32, p))
    assert np.all(load == 0.0)


def test_solve_eps_one():
    p = make_problem(1.0, "one", "one")
    u = solve(p, uniform_mesh(64))
    assert 1 - 1 / math.cosh(1) == pytest.approx(0.351946, abs=1e-6)
    assert float(u(0.0)[0]) == pytest.approx(1 - 1 / math.cosh(1), abs=1e-3)


def test_zero_source_gives_zero():
    p = make_problem(1e-3, "one", "zero")
    u = solve(p, build_mesh("exp", 64, p))
    assert np.all(u.coeffs == 0.0)


def test_quasi_optimality_example():
    p = make_problem(0.1, "one", "one")
    ref = closed_form_const(p)
    m = build_mesh("shishkin", 128, p)
    u = solve(p, m)
    iu = interpolant(m, ref)
    e_g = norm_energy(p, lambda x: tuple(a - b for a, b in zip(ref(x), u(x))), m)
    e_i = norm_energy(p, lambda x: tuple(a - b for a, b in zip(ref(x), iu(x))), m)
    assert e_g <= e_i


def test_eval_fe_hat():
    u = FeSolution(mesh_from_nodes([-1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]))
    v, d = eval_fe(u, 0.5)
    assert (float(v), float(d)) == (0.5, -1.0)
    # interior node: right element slope
    v, d = eval_fe(u, 0.0)
    assert (float(v), float(d)) == (1.0, -1.0)
    v, d = eval_fe(u, -1.0)
    assert (float(v), float(d)) == (0.0, 1.0)
    v, d = eval_fe(u, 1.0)
    assert (float(v), float(d)) == (0.0, -1.0)


def test_eval_fe_at_nodes():
    p = make_problem(1e-2, "one", "poly2")
    u = solve(p, build_mesh("bs", 32, p))
    v, _ = u(u.nodes)
    np.testing.assert_array_equal(v, u.coeffs)
    assert u.coeffs[0] == 0.0 and u.coeffs[-1] == 0.0 and u.bc_respected


def test_ritz_energy_examples():
    p = make_problem(0.3, "one", "one")
    assert ritz_energy(p, lambda x: (0 * x, 0 * x)) == 0.0
    cs = np.linspace(-1, 3, 41)
    vals = [ritz_energy(p, lambda x, c=c: (c + 0 * x, 0 * x)) for c in cs]
    np.testing.assert_allclose(vals, cs**2 - 2 * cs, atol=1e-13)
    assert cs[int(np.argmin(vals))] == pytest.approx(1.0)


def test_ritz_minimizer_along_hats():
    p = make_problem(1e-2, "one", "one")
    m = build_mesh("shishkin", 32, p)
    u = solve(p, m)
    for j in (1, 5, 8, 16, 24, 31):
        h = hat(m, j)
        ts = np.array([-1e-3, 0.0, 1e-3])
        e = [ritz_energy(p, FeSolution(m, u.coeffs + t * h.coeffs)) for t in ts]
        # quadratic in t: vertex of the parabola through three points
        a = (e[0] - 2 * e[1] + e[2]) / (2 * ts[2] ** 2)
        b = (e[2] - e[0]) / (2 * ts[2])
        assert abs(-b / (2 * a)) <= 1e-8


def test_ritz_galerkin_below_interpolant():
    for eps in (1e-1, 1e-3, 1e-6):
        p = make_problem(eps, "one", "one")
        ref = closed_form_const(p)
        m = build_mesh("shishkin", 64, p)
        assert ritz_energy(p, solve(p, m)) <= ritz_energy(p, interpolant(m, ref)) + 1e-15


@pytest.mark.parametrize("eps", [1e-1, 1e-3, 1e-6])
def test_galerkin_orthogonality(eps):
    p = make_problem(eps, "one", "one")
    ref = closed_form_const(p)
    m = build_mesh("shishkin", 64, p)
    u = solve(p, m)
    rule = gauss_rule(10)
    for j in range(1, m.N):
        # B(u - u_h, hat_j) over the two elements of its support, 16 panels each
        edges = np.concatenate([np.linspace(m.nodes[j - 1], m.nodes[j], 17)[:-1],
                                np.linspace(m.nodes[j], m.nodes[j + 1], 17)])
        x, w = composite_points(edges, rule)
        ue, due = ref(x)
        uh, duh = u(x)
        hv, hd = hat(m, j)(x)
        # the quadrature split sits on the node, so derivatives are taken per element
        left = x < m.nodes[j]
        hd = np.where(left, 1.0 / m.h[j - 1], -1.0 / m.h[j])
        duh = np.where(left, u.slopes[j - 1], u.slopes[j])
        val = np.sum(w * (eps**2 * (due - duh) * hd + (ue - uh) * hv))
        assert abs(val) <= 1e-8


def test_symmetry_even_data():
    p = make_problem(1e-4, "one", "poly2")
    for kind in ("shishkin", "exp", "bs", "uniform"):
        u = solve(p, build_mesh(kind, 128, p))
        np.testing.assert_allclose(u.coeffs, u.coeffs[::-1], atol=1e-10)


@given(n=st.integers(1, 60), seed=st.integers(0, 2**31))
def test_thomas_matches_dense(n, seed):
    r = np.random.default_rng(seed)
    lo = r.uniform(-1, 1, n - 1)
    up = lo.copy()
    d = np.abs(lo).sum() + np.abs(up).sum() + r.uniform(1, 2, n)
    rhs = r.normal(size=n)
    x = thomas_solve(lo, d, up, rhs)
    A = np.diag(d) + np.diag(lo, -1) + np.diag(up, 1)
    np.testing.assert_allclose(x, np.linalg.solve(A, rhs), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(tridiag_matvec(lo, d, up, x), rhs, atol=1e-10)
