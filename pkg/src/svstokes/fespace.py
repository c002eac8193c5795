"""Lagrange finite element spaces on triangulations.

Local node ordering for degree ``k``: the three vertices, then the interior
nodes of edge ``i`` (opposite vertex ``i``, running from vertex ``i+1`` to
``i+2``), then the cell-interior nodes.  Edge nodes are numbered globally
from the lower-index endpoint, so both neighbours of an edge agree.

Vector spaces interleave components: node ``a`` owns DOFs ``2a`` (x) and
``2a + 1`` (y).
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Literal

import numpy as np

from .mesh import Triangulation
from .quadrature import QuadratureRule, quadrature_rule

Family = Literal[
    "vector-lagrange-continuous",
    "scalar-lagrange-continuous",
    "scalar-lagrange-discontinuous",
]


@dataclass(frozen=True)
class ElementKind:
    family: Family
    degree: int

    def __post_init__(self):
        if self.family not in Family.__args__:
            raise ValueError(f"unknown element family {self.family!r}")
        lo = 0 if self.discontinuous else 1
        if self.degree < lo:
            raise ValueError(f"{self.family} needs degree >= {lo}")

    @property
    def discontinuous(self) -> bool:
        return self.family == "scalar-lagrange-discontinuous"

    @property
    def n_components(self) -> int:
        return 2 if self.family.startswith("vector") else 1

    @property
    def n_local_nodes(self) -> int:
        return (self.degree + 1) * (self.degree + 2) // 2

    @property
    def local_dim(self) -> int:
        return self.n_components * self.n_local_nodes


def vector_lagrange(k: int) -> ElementKind:
    return ElementKind("vector-lagrange-continuous", k)


def scalar_lagrange(k: int) -> ElementKind:
    return ElementKind("scalar-lagrange-continuous", k)


def scalar_dg(k: int) -> ElementKind:
    return ElementKind("scalar-lagrange-discontinuous", k)


@lru_cache(maxsize=None)
def lattice(k: int) -> np.ndarray:
    """Multi-indices ``(a0, a1, a2)`` with sum ``k`` in local node order."""
    if k == 0:
        return np.zeros((1, 3), dtype=np.int64)
    nodes = [(k, 0, 0), (0, k, 0), (0, 0, k)]
    for i in range(3):
        j, l = (i + 1) % 3, (i + 2) % 3
        for m in range(1, k):
            a = [0, 0, 0]
            a[j], a[l] = k - m, m
            nodes.append(tuple(a))
    for a1 in range(1, k):
        for a2 in range(1, k - a1):
            nodes.append((k - a1 - a2, a1, a2))
    return np.array(nodes, dtype=np.int64)


def lattice_points(k: int) -> np.ndarray:
    """Barycentric coordinates of the local nodes."""
    if k == 0:
        return np.full((1, 3), 1 / 3)
    return lattice(k) / k


def _silvester(m: int, k: int, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """R_m(lam) = prod_{j<m} (k lam - j)/(j+1) and its derivative."""
    val = np.ones_like(lam)
    der = np.zeros_like(lam)
    for j in range(m):
        f = (k * lam - j) / (j + 1)
        der = der * f + val * (k / (j + 1))
        val = val * f
    return val, der


def reference_basis(element: ElementKind | int, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scalar nodal basis at barycentric ``points``.

    Returns ``values`` (npts, nloc) and ``gradients`` (npts, nloc, 2) with
    respect to the reference coordinates ``(x, y) = (l1, l2)``.  For vector
    elements the scalar basis is returned; components are handled by the
    DOF layout.
    """
    k = element if isinstance(element, int) else element.degree
    lam = np.atleast_2d(np.asarray(points, dtype=float))
    alpha = lattice(k)
    npts = lam.shape[0]
    vals = np.ones((npts, len(alpha)))
    dlam = np.zeros((npts, len(alpha), 3))
    if k == 0:
        return vals, np.zeros((npts, 1, 2))
    for n, a in enumerate(alpha):
        fac = [_silvester(int(a[i]), k, lam[:, i]) for i in range(3)]
        vals[:, n] = fac[0][0] * fac[1][0] * fac[2][0]
        dlam[:, n, 0] = fac[0][1] * fac[1][0] * fac[2][0]
        dlam[:, n, 1] = fac[0][0] * fac[1][1] * fac[2][0]
        dlam[:, n, 2] = fac[0][0] * fac[1][0] * fac[2][1]
    grads = np.stack([dlam[..., 1] - dlam[..., 0], dlam[..., 2] - dlam[..., 0]], axis=-1)
    return vals, grads


class FeSpace:
    """Global DOF map of one element kind on one mesh.

    Attributes
    ----------
    mesh : Triangulation
    element : ElementKind
    n_nodes : int
        Number of scalar nodes.
    cell_nodes : (nt, nloc) int array
    cell_dofs : (nt, ncomp * nloc) int array
        For vector spaces ordered ``[x0, y0, x1, y1, ...]`` by local node.
    n_dofs : int
    node_coords : (n_nodes, 2)
    dof_coords : (n_dofs, 2)
    boundary_nodes, boundary_dofs : sorted int arrays (continuous families)
    """

    zero_mean_constrained = False

    def __init__(self, mesh: Triangulation, element: ElementKind):
        self.mesh = mesh
        self.element = element
        k = element.degree
        nt = mesh.n_triangles
        nloc = element.n_local_nodes
        tris = mesh.triangles
        if element.discontinuous:
            self.cell_nodes = np.arange(nt * nloc, dtype=np.int64).reshape(nt, nloc)
            self.n_nodes = nt * nloc
        else:
            edges, tri_edges = mesh.edges
            nv, ne = mesh.n_vertices, len(edges)
            cn = np.empty((nt, nloc), dtype=np.int64)
            cn[:, :3] = tris
            col = 3
            for i in range(3):
                j, l = (i + 1) % 3, (i + 2) % 3
                e = tri_edges[:, i]
                forward = tris[:, j] < tris[:, l]
                for m in range(1, k):
                    # node m steps from local vertex j; global index counts from lower vertex
                    g = np.where(forward, m, k - m)
                    cn[:, col] = nv + e * (k - 1) + (g - 1)
                    col += 1
            ni = nloc - col
            base = nv + ne * (k - 1)
            cn[:, col:] = base + np.arange(nt)[:, None] * ni + np.arange(ni)[None, :]
            self.cell_nodes = cn
            self.n_nodes = base + nt * ni

        ncomp = element.n_components
        if ncomp == 1:
            self.cell_dofs = self.cell_nodes
        else:
            self.cell_dofs = np.stack(
                [2 * self.cell_nodes, 2 * self.cell_nodes + 1], axis=-1
            ).reshape(nt, -1)
        self.n_dofs = ncomp * self.n_nodes

        bary = lattice_points(k)
        phys = np.einsum("pi,tid->tpd", bary, mesh.vertices[tris])
        coords = np.empty((self.n_nodes, 2))
        coords[self.cell_nodes.ravel()] = phys.reshape(-1, 2)
        self.node_coords = coords
        self.dof_coords = np.repeat(coords, ncomp, axis=0)

        if element.discontinuous:
            self.boundary_nodes = np.zeros(0, dtype=np.int64)
        else:
            self.boundary_nodes = self._find_boundary_nodes()
        if ncomp == 1:
            self.boundary_dofs = self.boundary_nodes
        else:
            self.boundary_dofs = np.sort(
                np.concatenate([2 * self.boundary_nodes, 2 * self.boundary_nodes + 1])
            )

    def _find_boundary_nodes(self) -> np.ndarray:
        tri, loc = self.mesh.boundary_edge_triangles
        nodes = [self.cell_nodes[t, self.edge_local_nodes(l)] for t, l in zip(tri, loc)]
        if not nodes:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(nodes))

    def edge_local_nodes(self, i: int) -> np.ndarray:
        """Local nodes on edge ``i`` (opposite vertex ``i``), endpoints first."""
        alpha = lattice(self.element.degree)
        return np.flatnonzero(alpha[:, i] == 0)

    @property
    def degree(self) -> int:
        return self.element.degree

    @property
    def n_components(self) -> int:
        return self.element.n_components

    @cached_property
    def jacobians(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Affine map data ``(J, Jinv_T, detJ)`` per triangle."""
        p = self.mesh.vertices[self.mesh.triangles]
        J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        inv = np.empty_like(J)
        inv[:, 0, 0] = J[:, 1, 1] / det
        inv[:, 1, 1] = J[:, 0, 0] / det
        inv[:, 0, 1] = -J[:, 0, 1] / det
        inv[:, 1, 0] = -J[:, 1, 0] / det
        return J, np.transpose(inv, (0, 2, 1)), det

    def tabulate(self, points: np.ndarray, cells: np.ndarray | None = None):
        """Scalar basis values and physical gradients at reference points.

        Returns ``values`` (np, nloc) and ``grads`` (nc, np, nloc, 2).
        """
        vals, rgrad = reference_basis(self.element.degree, points)
        _, jit, _ = self.jacobians
        if cells is not None:
            jit = jit[cells]
        grads = np.einsum("tde,pne->tpnd", jit, rgrad)
        return vals, grads

    def map_points(self, points: np.ndarray, cells: np.ndarray | None = None) -> np.ndarray:
        """Physical coordinates of barycentric points, (nc, np, 2)."""
        tris = self.mesh.triangles if cells is None else self.mesh.triangles[cells]
        return np.einsum("pi,tid->tpd", np.atleast_2d(points), self.mesh.vertices[tris])

    def interpolate(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray] | float) -> "FeFunction":
        """Nodal interpolation of ``f(x, y)``.

        ``f`` returns an array of shape (..., ncomp) for vector spaces or (...)
        for scalar ones.  Discontinuous spaces use :func:`project_dg`.
        """
        if self.element.discontinuous:
            raise NotImplementedError("use project_dg for discontinuous spaces")
        x, y = self.node_coords[:, 0], self.node_coords[:, 1]
        vals = _eval_field(f, x, y, self.n_components)
        return FeFunction(self, vals.reshape(-1).copy())

    def zero(self) -> "FeFunction":
        return FeFunction(self, np.zeros(self.n_dofs))

    def __repr__(self):
        return f"FeSpace({self.element.family}, degree={self.degree}, n_dofs={self.n_dofs})"


def _eval_field(f, x, y, ncomp):
    if callable(f):
        v = np.asarray(f(x, y), dtype=float)
    else:
        v = np.asarray(f, dtype=float)
    shape = x.shape + ((ncomp,) if ncomp > 1 else ())
    return np.broadcast_to(v, shape).astype(float)


def build_space(tri: Triangulation, element: ElementKind) -> FeSpace:
    return FeSpace(tri, element)


class FeFunction:
    """Coefficient vector bound to a :class:`FeSpace`."""

    def __init__(self, space: FeSpace, coefficients: np.ndarray | None = None):
        self.space = space
        if coefficients is None:
            coefficients = np.zeros(space.n_dofs)
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (space.n_dofs,):
            raise ValueError(
                f"expected {space.n_dofs} coefficients, got {coefficients.shape}"
            )
        self.coefficients = coefficients

    def _local(self, cells):
        c = self.coefficients[self.space.cell_dofs[cells]]
        if self.space.n_components == 2:
            c = c.reshape(len(c), -1, 2)
        return c

    def values_at(self, points: np.ndarray, cells: np.ndarray | None = None) -> np.ndarray:
        """Values at reference points on every (or the given) cell.

        Shape (nc, np) for scalar spaces, (nc, np, 2) for vector ones.
        """
        cells = np.arange(self.space.mesh.n_triangles) if cells is None else np.asarray(cells)
        vals, _ = reference_basis(self.space.degree, points)
        c = self._local(cells)
        if c.ndim == 2:
            return np.einsum("pn,tn->tp", vals, c)
        return np.einsum("pn,tnc->tpc", vals, c)

    def gradients_at(self, points: np.ndarray, cells: np.ndarray | None = None) -> np.ndarray:
        """Physical gradients; (nc, np, 2) scalar or (nc, np, 2, 2) vector
        with ``[..., c, d] = d u_c / d x_d``."""
        cells = np.arange(self.space.mesh.n_triangles) if cells is None else np.asarray(cells)
        _, grads = self.space.tabulate(points, cells)
        c = self._local(cells)
        if c.ndim == 2:
            return np.einsum("tpnd,tn->tpd", grads, c)
        return np.einsum("tpnd,tnc->tpcd", grads, c)

    def divergence_at(self, points: np.ndarray, cells: np.ndarray | None = None) -> np.ndarray:
        g = self.gradients_at(points, cells)
        return g[..., 0, 0] + g[..., 1, 1]

    def evaluate(self, triangle: int, point) -> np.ndarray:
        return self.values_at(np.atleast_2d(point), np.array([triangle]))[0, 0]

    def evaluate_gradient(self, triangle: int, point) -> np.ndarray:
        return self.gradients_at(np.atleast_2d(point), np.array([triangle]))[0, 0]

    def evaluate_divergence(self, triangle: int, point) -> float:
        return float(self.divergence_at(np.atleast_2d(point), np.array([triangle]))[0, 0])

    def integrate(self, rule: QuadratureRule | None = None) -> float | np.ndarray:
        rule = rule or quadrature_rule(2 * self.space.degree)
        v = self.values_at(rule.points)
        _, _, det = self.space.jacobians
        w = rule.weights[None, :] * np.abs(det)[:, None]
        if v.ndim == 2:
            return float((v * w).sum())
        return (v * w[..., None]).sum(axis=(0, 1))

    def copy(self) -> "FeFunction":
        return FeFunction(self.space, self.coefficients.copy())

    def __add__(self, other):
        return FeFunction(self.space, self.coefficients + other.coefficients)

    def __sub__(self, other):
        return FeFunction(self.space, self.coefficients - other.coefficients)

    def __mul__(self, a: float):
        return FeFunction(self.space, a * self.coefficients)

    __rmul__ = __mul__


def project_dg(space: FeSpace, f: Callable[[np.ndarray, np.ndarray], np.ndarray],
               degree: int | None = None) -> FeFunction:
    """Elementwise L2 projection of a scalar field into a discontinuous space."""
    if not space.element.discontinuous:
        raise ValueError("project_dg needs a discontinuous space")
    rule = quadrature_rule(degree if degree is not None else 2 * space.degree + 4)
    x = space.map_points(rule.points)
    return project_dg_values(space, np.asarray(f(x[..., 0], x[..., 1]), dtype=float), rule)


def project_dg_values(space: FeSpace, values: np.ndarray, rule: QuadratureRule) -> FeFunction:
    """L2 projection from values (nt, nq) at the points of ``rule``."""
    vals, _ = reference_basis(space.degree, rule.points)
    mass = vals.T @ (rule.weights[:, None] * vals)
    rhs = np.einsum("q,qn,tq->tn", rule.weights, vals, values)
    coef = np.linalg.solve(mass, rhs.T).T
    out = np.empty(space.n_dofs)
    out[space.cell_dofs.ravel()] = coef.ravel()
    return FeFunction(space, out)


def write_function(fn: FeFunction) -> str:
    el = fn.space.element
    out = io.StringIO()
    out.write(f"fefunction {el.family} {el.degree} {fn.space.n_dofs}\n")
    for c in fn.coefficients.tolist():
        out.write(f"{c!r}\n")
    return out.getvalue()


def read_function(text: str, space: FeSpace) -> FeFunction:
    lines = [s.strip() for s in text.splitlines() if s.strip() and not s.lstrip().startswith("#")]
    head = lines[0].split() if lines else []
    if len(head) != 4 or head[0] != "fefunction":
        raise ValueError("expected header 'fefunction <family> <degree> <n_dofs>'")
    family, degree, n = head[1], int(head[2]), int(head[3])
    if family != space.element.family or degree != space.degree or n != space.n_dofs:
        raise ValueError("function header does not match the target space")
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} coefficients, found {len(lines) - 1}")
    return FeFunction(space, np.array([float(s) for s in lines[1:]]))
