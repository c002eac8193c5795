import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svstokes.fespace import (
    FeFunction,
    FeSpace,
    build_space,
    lattice_points,
    project_dg,
    project_dg_values,
    read_function,
    reference_basis,
    scalar_dg,
    scalar_lagrange,
    vector_lagrange,
)
from svstokes.boundary import boundary_normal_flux
from svstokes.manufactured import manufactured
from svstokes.mesh import generate_rect_mesh
from svstokes.quadrature import quadrature_rule
from svstokes.fespace import write_function

barycentric = st.tuples(st.floats(0, 1), st.floats(0, 1)).filter(lambda t: t[0] + t[1] <= 1).map(
    lambda t: np.array([1 - t[0] - t[1], t[0], t[1]])
)


@pytest.mark.parametrize("k", range(0, 6))
def test_delta_property(k):
    vals, _ = reference_basis(k, lattice_points(k))
    assert np.abs(vals - np.eye(len(vals))).max() <= 1e-13


@given(barycentric, st.integers(1, 5))
def test_partition_of_unity(lam, k):
    vals, grads = reference_basis(k, lam[None])
    assert vals.sum() == pytest.approx(1.0, abs=1e-13)
    assert np.abs(grads.sum(axis=1)).max() <= 1e-12


def _dedup_count(space):
    # independent oracle: number of distinct physical node positions
    pts = np.round(space.node_coords[space.cell_nodes.ravel()], 10)
    return len(np.unique(pts, axis=0))


def test_dof_counts_two_triangle_square():
    tri = generate_rect_mesh(0, 1, 0, 1, 1)
    S = FeSpace(tri, scalar_lagrange(4))
    assert S.n_dofs == 25 == _dedup_count(S)
    V = FeSpace(tri, vector_lagrange(4))
    assert V.n_dofs == 50
    assert np.allclose(V.dof_coords[0::2], V.dof_coords[1::2])


@pytest.mark.parametrize("pattern", ["diagonal", "crisscross"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_global_numbering_matches_dedup(pattern, k):
    tri = generate_rect_mesh(0, 2, 0, 1, 3, pattern)
    S = build_space(tri, scalar_lagrange(k))
    assert S.n_dofs == _dedup_count(S)
    # shared nodes must have identical coordinates seen from every triangle
    bary = lattice_points(k)
    phys = np.einsum("pi,tid->tpd", bary, tri.vertices[tri.triangles])
    assert np.allclose(S.node_coords[S.cell_nodes], phys)
    assert S.cell_dofs.size == tri.n_triangles * (k + 1) * (k + 2) // 2


def test_dg_counts():
    tri = generate_rect_mesh(0, 1, 0, 1, 3)
    Q = FeSpace(tri, scalar_dg(3))
    assert Q.n_dofs == 10 * tri.n_triangles
    assert Q.boundary_dofs.size == 0
    with pytest.raises(NotImplementedError):
        Q.interpolate(lambda x, y: x)


def test_boundary_nodes_on_boundary():
    tri = generate_rect_mesh(6, 12, 0, 6, 3)
    V = FeSpace(tri, vector_lagrange(4))
    x, y = V.dof_coords[V.boundary_dofs].T
    on = np.isclose(x, 6) | np.isclose(x, 12) | np.isclose(y, 0) | np.isclose(y, 6)
    assert on.all()
    x, y = np.delete(V.dof_coords, V.boundary_dofs, axis=0).T
    on = np.isclose(x, 6) | np.isclose(x, 12) | np.isclose(y, 0) | np.isclose(y, 6)
    assert not on.any()


@pytest.fixture(scope="module")
def v4():
    return FeSpace(generate_rect_mesh(6, 12, 0, 6, 3, "crisscross"), vector_lagrange(4))


def _random_points(space, rng, n=50):
    cells = rng.integers(0, space.mesh.n_triangles, n)
    lam = rng.dirichlet(np.ones(3), n)
    return cells, lam


def test_interpolate_constant(v4, rng):
    u = v4.interpolate(lambda x, y: np.stack(np.broadcast_arrays(3.0 + 0 * x, -1.0 + 0 * y), -1))
    cells, lam = _random_points(v4, rng)
    for c, l in zip(cells, lam):
        assert np.allclose(u.evaluate(c, l), [3, -1], atol=1e-13)


def test_interpolate_reproduces_quartics(v4, rng):
    f = lambda x, y: np.stack([x**4, y**4], -1)
    u = v4.interpolate(f)
    cells, lam = _random_points(v4, rng)
    X = np.einsum("ni,nid->nd", lam, v4.mesh.vertices[v4.mesh.triangles[cells]])
    got = np.array([u.evaluate(c, l) for c, l in zip(cells, lam)])
    exact = f(X[:, 0], X[:, 1])
    assert np.abs(got - exact).max() <= 1e-12 * np.abs(exact).max()


def test_manufactured_value_at_corner():
    assert np.allclose(manufactured().u(6.0, 0.0), [0.0, 35 / 6])


def test_divergence_of_linear_fields(v4, rng):
    a = v4.interpolate(lambda x, y: np.stack([x, -y], -1))
    b = v4.interpolate(lambda x, y: np.stack([x, y], -1))
    cells, lam = _random_points(v4, rng, 20)
    for c, l in zip(cells, lam):
        assert abs(a.evaluate_divergence(c, l)) <= 1e-11
        assert b.evaluate_divergence(c, l) == pytest.approx(2.0, abs=1e-11)


def test_gradient_of_interpolated_x2y(rng):
    S = FeSpace(generate_rect_mesh(6, 12, 0, 6, 2), scalar_lagrange(4))
    u = S.interpolate(lambda x, y: x * x * y)
    cells, lam = _random_points(S, rng)
    X = np.einsum("ni,nid->nd", lam, S.mesh.vertices[S.mesh.triangles[cells]])
    for c, l, (x, y) in zip(cells, lam, X):
        assert np.allclose(u.evaluate_gradient(c, l), [2 * x * y, x * x], atol=1e-11, rtol=0)


def test_discrete_divergence_theorem(v4, rng):
    rule = quadrature_rule(8)
    for _ in range(5):
        v = FeFunction(v4, rng.standard_normal(v4.n_dofs))
        _, _, det = v4.jacobians
        w = rule.weights[None, :] * np.abs(det)[:, None]
        lhs = (w * v.divergence_at(rule.points)).sum()
        rhs = boundary_normal_flux(v)
        scale = np.abs(w * v.divergence_at(rule.points)).sum()
        assert abs(lhs - rhs) <= 1e-11 * scale


def test_divergence_is_dg_of_degree_k_minus_1(v4, rng):
    v = FeFunction(v4, rng.standard_normal(v4.n_dofs))
    Q = FeSpace(v4.mesh, scalar_dg(3))
    rule = quadrature_rule(8)
    p = project_dg_values(Q, v.divergence_at(rule.points), rule)
    pts = rng.dirichlet(np.ones(3), 12)
    d = v.divergence_at(pts)
    assert np.abs(p.values_at(pts) - d).max() <= 1e-12 * np.abs(d).max()


def test_project_dg_reproduces_polynomials():
    Q = FeSpace(generate_rect_mesh(0, 1, 0, 1, 2), scalar_dg(2))
    p = project_dg(Q, lambda x, y: 1 + x * y - y * y)
    pts = lattice_points(3)
    X = Q.map_points(pts)
    assert np.allclose(p.values_at(pts), 1 + X[..., 0] * X[..., 1] - X[..., 1] ** 2, atol=1e-13)


def test_function_round_trip(v4, rng):
    v = FeFunction(v4, rng.standard_normal(v4.n_dofs))
    w = read_function(write_function(v), v4)
    assert np.array_equal(v.coefficients, w.coefficients)
    with pytest.raises(ValueError):
        read_function(write_function(v), FeSpace(v4.mesh, scalar_dg(1)))
