import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiflow import (Field, derivative, gradient_sq, h1_norm_sq, integrate, l2_norm, make_grid,
                       radial_laplacian, sphere_measure, sup_norm)
from quasiflow.errors import PreconditionError


def field(grid, f):
    return Field(grid, f(grid.nodes))


def test_grid_spacing():
    g = make_grid(1, 20.0, 2000)
    assert g.h == pytest.approx(0.01, abs=1e-15)
    assert g.nodes[0] == 0.0 and np.all(np.diff(g.nodes) > 0)
    assert g.h * g.n == pytest.approx(g.rmax, rel=1e-15)


def test_grid_node_value():
    assert make_grid(2, 15.0, 1500).nodes[750] == pytest.approx(7.5, abs=1e-14)


@pytest.mark.parametrize("args", [(3, 10.0, 15), (0, 10.0, 100), (2, math.inf, 100),
                                  (2, math.nan, 100), (2, -1.0, 100)])
def test_grid_rejects(args):
    with pytest.raises(PreconditionError):
        make_grid(*args)


def test_field_rejects_bad_values():
    g = make_grid(1, 5.0, 50)
    with pytest.raises(PreconditionError):
        Field(g, np.zeros(50))
    v = np.zeros(51)
    v[3] = np.nan
    with pytest.raises(PreconditionError):
        Field(g, v)


@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_laplacian_constant_is_zero(dim):
    g = make_grid(dim, 10.0, 100)
    lap = radial_laplacian(field(g, lambda r: 3.0 + 0 * r)).values
    assert np.max(np.abs(lap[:-1])) == 0.0


@pytest.mark.parametrize("dim,exact", [(1, 2.0), (3, 6.0)])
def test_laplacian_of_r_squared(dim, exact):
    g = make_grid(dim, 10.0, 100)
    lap = radial_laplacian(field(g, lambda r: r * r)).values
    np.testing.assert_allclose(lap[1:-1], exact, rtol=1e-9)
    assert lap[0] == pytest.approx(exact, rel=1e-12)


def test_gradient_sq_examples():
    g = make_grid(2, 10.0, 100)
    assert np.all(gradient_sq(field(g, lambda r: 0 * r + 2)).values == 0)
    np.testing.assert_allclose(gradient_sq(field(g, lambda r: r)).values[1:-1], 1.0, rtol=1e-12)
    assert gradient_sq(field(g, lambda r: r)).values[0] == 0.0
    fine = make_grid(1, 6.0, 4000)
    err = np.max(np.abs(gradient_sq(field(fine, np.sin)).values[1:] - np.cos(fine.nodes[1:]) ** 2))
    assert err < 5 * fine.h**2


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("which", ["laplacian", "gradient"])
def test_stencils_converge_at_second_order(dim, which):
    errs = []
    for n in (400, 800):
        g = make_grid(dim, 8.0, n)
        r = g.nodes
        f = field(g, lambda r: np.exp(-r * r))
        if which == "laplacian":
            e = radial_laplacian(f).values - (4 * r * r - 2 * dim) * np.exp(-r * r)
        else:
            e = gradient_sq(f).values - 4 * r * r * np.exp(-2 * r * r)
        errs.append(np.max(np.abs(e)))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_integrate_examples():
    assert integrate(field(make_grid(2, 1.0, 64), lambda r: 1 + 0 * r)) == pytest.approx(math.pi, abs=1e-10)
    assert integrate(field(make_grid(1, 5.0, 64), lambda r: 1 + 0 * r)) == pytest.approx(10.0, abs=1e-12)
    # O(h²) quadrature: refined until the error is below 1e-6
    g = make_grid(3, 8.0, 12800)
    assert integrate(field(g, lambda r: np.exp(-r * r))) == pytest.approx(math.pi**1.5, abs=1e-6)


@pytest.mark.parametrize("dim", [1, 2, 3, 4, 7])
def test_integrate_exact_on_constants(dim):
    rmax = 3.7
    g = make_grid(dim, rmax, 37)
    exact = sphere_measure(dim) * rmax**dim / dim
    assert abs(integrate(field(g, lambda r: 1 + 0 * r)) - exact) <= 1e-10 * rmax**dim


def test_sphere_measure():
    assert sphere_measure(1) == pytest.approx(2.0)
    assert sphere_measure(2) == pytest.approx(2 * math.pi)
    assert sphere_measure(3) == pytest.approx(4 * math.pi)


def test_norms():
    g = make_grid(1, 5.0, 500)
    zero = field(g, lambda r: 0 * r)
    assert sup_norm(zero) == l2_norm(zero) == h1_norm_sq(zero) == 0
    one = field(g, lambda r: 1 + 0 * r)
    assert sup_norm(one) == 1.0
    assert l2_norm(one) == pytest.approx(math.sqrt(10), rel=1e-12)
    fine = make_grid(1, 30.0, 30000)
    # e^{-|x|} has a kink at 0; the symmetric stencil loses O(h) there
    assert h1_norm_sq(field(fine, lambda r: np.exp(-r))) == pytest.approx(2.0, abs=2 * fine.h)


def test_derivative_symmetry_and_boundary():
    g = make_grid(2, 4.0, 400)
    d = derivative(field(g, lambda r: r**3)).values
    assert d[0] == 0.0
    assert d[-1] == pytest.approx(3 * 16.0, rel=1e-4)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_green_symmetry(dim):
    errs = []
    for n in (200, 400):
        g = make_grid(dim, 10.0, n)
        f = field(g, lambda r: np.exp(-r * r / 2) - np.exp(-50.0))
        h = field(g, lambda r: (1 + r) * np.exp(-r) - 11 * np.exp(-10.0))
        fh = integrate(Field(g, h.values * radial_laplacian(f).values))
        hf = integrate(Field(g, f.values * radial_laplacian(h).values))
        errs.append(abs(fh - hf))
    assert max(errs) <= g.h


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.floats(0.5, 20), st.integers(16, 300),
       st.floats(-5, 5), st.floats(-5, 5))
def test_integrate_is_linear(dim, rmax, n, a, b):
    g = make_grid(dim, rmax, n)
    f = field(g, lambda r: np.cos(r))
    h = field(g, lambda r: r * r)
    lhs = integrate(Field(g, a * f.values + b * h.values))
    rhs = a * integrate(f) + b * integrate(h)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10 * (1 + abs(integrate(h))))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.floats(0.5, 20), st.integers(16, 200), st.floats(-1e3, 1e3))
def test_laplacian_kills_constants(dim, rmax, n, c):
    g = make_grid(dim, rmax, n)
    lap = radial_laplacian(Field(g, np.full(n + 1, c))).values
    assert np.max(np.abs(lap)) <= 1e-9 * abs(c) / g.h**2 + 1e-300
