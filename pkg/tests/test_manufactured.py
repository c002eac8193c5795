from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svstokes.fespace import FeSpace, scalar_dg, vector_lagrange
from svstokes.fespace import project_dg
from svstokes.harness import build_mesh
from svstokes.manufactured import error_norms, manufactured

inside = st.tuples(st.floats(6, 12), st.floats(0, 6))


def test_point_values():
    c = manufactured(3.0)
    assert np.allclose(c.u(6.0, 0.0), [0.0, 35 / 6], atol=1e-15)
    assert c.p(10.0, 5.0) == pytest.approx(5 * 3.0)
    assert np.array_equal(c.g(7.0, 2.0), c.u(7.0, 2.0))


def test_divergence_free(rng):
    c = manufactured()
    x, y = rng.uniform(6, 12, 20), rng.uniform(0, 6, 20)
    g = c.grad_u(x, y)
    assert np.abs(g[:, 0, 0] + g[:, 1, 1]).max() <= 1e-12


@given(inside)
def test_gradients_against_finite_differences(pt):
    c = manufactured(2.0)
    x, y = pt
    h = 1e-6
    fd_u = np.stack([(c.u(x + h, y) - c.u(x - h, y)) / (2 * h), (c.u(x, y + h) - c.u(x, y - h)) / (2 * h)], -1)
    assert np.allclose(c.grad_u(x, y), fd_u, atol=1e-7)
    fd_p = [(c.p(x + h, y) - c.p(x - h, y)) / (2 * h), (c.p(x, y + h) - c.p(x, y - h)) / (2 * h)]
    assert np.allclose(c.grad_p(x, y), fd_p, atol=1e-7)
    assert np.array_equal(c.f(x, y), c.grad_p(x, y))


@given(inside)
def test_stokes_residual_vanishes(pt):
    # -Laplace u + grad p = f with nu = 1, Laplacian by second differences
    c = manufactured()
    x, y = pt
    h = 1e-3
    lap = (c.u(x + h, y) + c.u(x - h, y) + c.u(x, y + h) + c.u(x, y - h) - 4 * c.u(x, y)) / h**2
    assert np.allclose(-lap + c.grad_p(x, y), c.f(x, y), atol=1e-5)


def test_origin_guard():
    with pytest.raises(ValueError):
        manufactured().u(0.0, 0.0)


@pytest.fixture(scope="module")
def interp():
    mesh = build_mesh(4, "full")
    V = FeSpace(mesh, vector_lagrange(4))
    c = manufactured()
    return c, V.interpolate(c.u), project_dg(FeSpace(mesh, scalar_dg(3)), c.p)


def test_error_norms_of_interpolant(interp):
    c, u, p = interp
    r = error_norms(u, p, c)
    assert 0 < r.err_l2_u < 1e-4 and 0 < r.err_h1semi_u < 1e-3
    r2 = error_norms(u, p, c, quad_degree=14)
    for a, b in ((r.err_l2_u, r2.err_l2_u), (r.err_h1_u, r2.err_h1_u), (r.err_l2_p, r2.err_l2_p)):
        assert abs(a - b) <= 1e-3 * b
    assert r.err_h1_u**2 >= r.err_h1semi_u**2 and r.err_h1_u**2 >= r.err_l2_u**2


def test_error_norms_zero_for_polynomials():
    mesh = build_mesh(2, "full")
    V = FeSpace(mesh, vector_lagrange(4))

    def u(x, y):
        return np.stack(np.broadcast_arrays(3 * x**2 * y**2, -2 * x * y**3), -1)

    def grad_u(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        g = np.empty(x.shape + (2, 2))
        g[..., 0, 0], g[..., 0, 1] = 6 * x * y**2, 6 * x * x * y
        g[..., 1, 0], g[..., 1, 1] = -2 * y**3, -6 * x * y * y
        return g

    p = lambda x, y: x**3 - y + 4.0  # the constant is removed by mean correction
    case = SimpleNamespace(u=u, grad_u=grad_u, p=p)
    r = error_norms(V.interpolate(u), project_dg(FeSpace(mesh, scalar_dg(3)), p), case)
    scale = np.abs(V.interpolate(u).coefficients).max()
    assert r.err_l2_u <= 1e-12 * scale and r.err_h1_u <= 1e-11 * scale and r.err_l2_p <= 1e-10


def test_error_norms_rejects_low_quadrature(interp):
    c, u, p = interp
    with pytest.raises(ValueError):
        error_norms(u, p, c, quad_degree=11)
