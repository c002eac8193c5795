"""Dirichlet data for the velocity and its discrete compatibility.

An exactly divergence-free discrete velocity needs boundary data with zero
net normal flux.  Nodal interpolation of a compatible field does not keep
that property; :func:`compatible_interpolate` restores it by subtracting a
multiple of the normal edge bubble on one boundary face.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fespace import FeFunction, FeSpace, _eval_field, lattice_points
from .mesh import Triangulation
from .quadrature import gauss_interval


@dataclass
class BoundaryData:
    """Prescribed velocity values on the boundary DOFs of ``space``.

    ``function`` is the full finite element function the values were taken
    from (for the compatible variant it contains the bubble correction,
    including its interior nodes on the corrected triangle).
    """

    space: FeSpace
    dofs: np.ndarray
    values: np.ndarray
    flux: float
    function: FeFunction
    correction: tuple[int, float] | None = None
    input_flux: float | None = None

    @property
    def dof_values(self) -> dict[int, float]:
        return dict(zip(self.dofs.tolist(), self.values.tolist()))


def _edge_points(s: np.ndarray, loc: np.ndarray) -> np.ndarray:
    """Barycentric points at parameter ``s`` along local edges ``loc``.

    Edge ``l`` runs from local vertex ``l+1`` to ``l+2``.  Returns
    (len(loc), len(s), 3).
    """
    out = np.zeros((len(loc), len(s), 3))
    idx = np.arange(len(loc))
    out[idx, :, (loc + 1) % 3] = 1 - s[None, :]
    out[idx, :, (loc + 2) % 3] = s[None, :]
    return out


def _boundary_values(v, tri: Triangulation, s: np.ndarray) -> np.ndarray:
    """Vector values (nb, ns, 2) of a function or field at edge parameters."""
    cells, loc = tri.boundary_edge_triangles
    pts = _edge_points(s, loc)
    if isinstance(v, FeFunction):
        out = np.empty((len(cells), len(s), 2))
        for l in range(3):
            sel = np.flatnonzero(loc == l)
            if sel.size:
                out[sel] = v.values_at(pts[sel[0]], cells[sel])
        return out
    verts = tri.vertices[tri.triangles[cells]]
    x = np.einsum("eqi,eid->eqd", pts, verts)
    return _eval_field(v, x[..., 0], x[..., 1], 2)


def edge_flux_integrals(v, tri: Triangulation, degree: int = 10) -> np.ndarray:
    """Integral of ``v . n`` over every boundary edge."""
    s, w = gauss_interval(degree)
    vals = _boundary_values(v, tri, s)
    cells, loc = tri.boundary_edge_triangles
    # orientation of s follows the owning triangle; the integral does not care
    vn = np.einsum("eqd,ed->eq", vals, tri.boundary_normals)
    length = tri.edge_lengths[cells, loc]
    return length * (vn @ w)


def boundary_normal_flux(v, tri: Triangulation | None = None, degree: int | None = None) -> float:
    """Net outward flux of a vector function or field through the boundary.

    ``v`` is a :class:`FeFunction` on a vector space or a callable
    ``f(x, y) -> (..., 2)``.  Gauss rules of exactness ``degree`` (default
    ``2k + 2``) are used on each edge.
    """
    if isinstance(v, FeFunction):
        tri = tri or v.space.mesh
        degree = degree if degree is not None else 2 * v.space.degree + 2
    elif tri is None:
        raise ValueError("a mesh is needed to integrate a pointwise field")
    degree = degree if degree is not None else 10
    return float(edge_flux_integrals(v, tri, degree).sum())


def default_face(tri: Triangulation) -> int:
    """Longest boundary edge, lowest index on ties."""
    L = tri.boundary_edge_lengths()
    return int(np.flatnonzero(L >= L.max() * (1 - 1e-12))[0])


def edge_bubble(tri: Triangulation, face: int, vspace: FeSpace) -> FeFunction:
    """Quadratic normal bubble ``l_a l_b n_f`` of boundary edge ``face``.

    Supported on the triangle owning the edge.
    """
    if vspace.n_components != 2:
        raise ValueError("edge_bubble needs a vector space")
    if vspace.degree < 2:
        raise ValueError("the quadratic bubble needs velocity degree >= 2")
    nb = len(tri.boundary_edges)
    if not 0 <= face < nb:
        raise ValueError(f"face {face} is not a boundary edge index (0..{nb - 1})")
    cells, loc = tri.boundary_edge_triangles
    t, l = int(cells[face]), int(loc[face])
    lam = lattice_points(vspace.degree)
    b = lam[:, (l + 1) % 3] * lam[:, (l + 2) % 3]
    n = tri.boundary_normals[face]
    coef = np.zeros(vspace.n_dofs)
    coef[vspace.cell_dofs[t]] = (b[:, None] * n[None, :]).ravel()
    return FeFunction(vspace, coef)


def bubble_integral(tri: Triangulation, face: int, degree: int = 4) -> float:
    """Integral of the scalar bubble over its face by Gauss quadrature."""
    s, w = gauss_interval(degree)
    a, b = tri.vertices[tri.boundary_edges[face]]
    return float(np.linalg.norm(b - a) * (w @ (s * (1 - s))))


def _make(space: FeSpace, fn: FeFunction, correction=None, input_flux=None) -> BoundaryData:
    dofs = space.boundary_dofs
    return BoundaryData(
        space=space,
        dofs=dofs,
        values=fn.coefficients[dofs].copy(),
        flux=boundary_normal_flux(fn),
        function=fn,
        correction=correction,
        input_flux=input_flux,
    )


def lagrange_boundary(vspace: FeSpace, g: Callable) -> BoundaryData:
    """Nodal interpolation of ``g`` on the boundary, flux left as is."""
    return _make(vspace, vspace.interpolate(g))


def compatible_interpolate(vspace: FeSpace, g: Callable, face: int | None = None) -> BoundaryData:
    """Nodal interpolation corrected to zero net flux on one boundary face.

    ``g_h = L_h g - c_f b_f n_f`` with ``c_f`` the flux of ``L_h g`` divided
    by the integral of ``b_f`` over the face.  Valid for ``g`` whose exact
    boundary flux vanishes.
    """
    tri = vspace.mesh
    face = default_face(tri) if face is None else face
    L = vspace.interpolate(g)
    flux = boundary_normal_flux(L)
    c_f = flux / bubble_integral(tri, face)
    gh = L - c_f * edge_bubble(tri, face, vspace)
    return _make(vspace, gh, correction=(face, c_f), input_flux=flux)


def make_boundary_data(vspace: FeSpace, g: Callable, mode: str = "compatible",
                       face: int | None = None) -> BoundaryData:
    if mode == "compatible":
        return compatible_interpolate(vspace, g, face)
    if mode == "lagrange":
        return lagrange_boundary(vspace, g)
    raise ValueError(f"unknown boundary mode {mode!r}")
