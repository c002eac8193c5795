"""Conforming 2D triangulations with singular-vertex detection and repair.

A :class:`Triangulation` stores vertex coordinates, counterclockwise
triangles and marked boundary edges.  All operations return new meshes;
a mesh is never modified in place.

Boundary markers used by :func:`generate_rect_mesh`: 1 bottom, 2 right,
3 top, 4 left.  Vertices created by barycentric splitting are always
interior, so splitting leaves the boundary edge list untouched.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

import numpy as np

SINGULAR_TOL = 1e-12


class MeshError(ValueError):
    """Raised when a mesh operation cannot be carried out."""


class MeshFormatError(MeshError):
    """Raised by :func:`read_mesh` on malformed input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
    d1 = p1 - p0
    d2 = p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Triangle mesh of a polygonal domain.

    Parameters
    ----------
    vertices : (nv, 2) float array
    triangles : (nt, 3) int array, counterclockwise vertex indices
    boundary_edges : (nb, 2) int array of vertex pairs
    boundary_markers : (nb,) int array, nonnegative
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_markers: np.ndarray = field(default=None)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 2)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        b = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        m = self.boundary_markers
        m = np.zeros(len(b), dtype=np.int64) if m is None else np.asarray(m, dtype=np.int64)
        for arr in (v, t, b, m):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "boundary_edges", b)
        object.__setattr__(self, "boundary_markers", m)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def areas(self) -> np.ndarray:
        """Signed triangle areas (positive for counterclockwise triangles)."""
        return _signed_areas(self.vertices, self.triangles)

    @cached_property
    def diameters(self) -> np.ndarray:
        """Longest edge length of each triangle."""
        return self.edge_lengths.max(axis=1)

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        """(nt, 3) lengths; column i is the edge opposite local vertex i."""
        p = self.vertices[self.triangles]
        return np.stack(
            [np.linalg.norm(p[:, (i + 2) % 3] - p[:, (i + 1) % 3], axis=1) for i in range(3)],
            axis=1,
        )

    @property
    def h(self) -> float:
        return float(self.diameters.max())

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique undirected edges and the per-triangle edge map.

        Returns ``(edges, tri_edges)``; ``edges`` is (ne, 2) with ascending
        vertex indices, ``tri_edges[t, i]`` is the edge opposite local vertex i.
        """
        t = self.triangles
        local = np.stack([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]], axis=1)
        flat = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(flat, axis=0, return_inverse=True)
        return edges, inverse.reshape(-1, 3)

    @cached_property
    def vertex_to_triangles(self) -> list[list[int]]:
        """Incident triangles of each vertex, ordered counterclockwise.

        Interior vertices get a closed fan, boundary vertices an open fan that
        starts and ends at a boundary edge.  Ordering follows shared edges,
        not angles.
        """
        nv = self.n_vertices
        # for triangle (v, a, b) in CCW order keyed at v: a -> (tri, b)
        succ: list[dict[int, tuple[int, int]]] = [dict() for _ in range(nv)]
        for ti, (p, q, r) in enumerate(self.triangles.tolist()):
            succ[p][q] = (ti, r)
            succ[q][r] = (ti, p)
            succ[r][p] = (ti, q)
        fans: list[list[int]] = []
        for v in range(nv):
            s = succ[v]
            if not s:
                fans.append([])
                continue
            targets = {b for _, b in s.values()}
            starts = [a for a in s if a not in targets]
            if len(starts) > 1:
                raise MeshError(f"vertex {v} has a non-manifold fan")
            a = first = starts[0] if starts else min(s)
            fan = []
            while a in s and len(fan) < len(s):
                ti, a = s[a]
                fan.append(ti)
                if a == first:
                    break
            fans.append(fan)
        return fans

    @cached_property
    def boundary_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_edges.ravel()] = True
        return mask

    @cached_property
    def boundary_edge_triangles(self) -> tuple[np.ndarray, np.ndarray]:
        """Owning triangle and local edge index of every boundary edge."""
        edges, tri_edges = self.edges
        lookup = {tuple(e): i for i, e in enumerate(edges.tolist())}
        owner = -np.ones(len(edges), dtype=np.int64)
        local = -np.ones(len(edges), dtype=np.int64)
        for ti, row in enumerate(tri_edges.tolist()):
            for li, e in enumerate(row):
                owner[e] = ti
                local[e] = li
        idx = []
        for a, b in self.boundary_edges.tolist():
            key = (min(a, b), max(a, b))
            if key not in lookup:
                raise MeshError(f"boundary edge {key} is not an edge of any triangle")
            idx.append(lookup[key])
        idx = np.asarray(idx, dtype=np.int64)
        return owner[idx], local[idx]

    @cached_property
    def boundary_normals(self) -> np.ndarray:
        """Outward unit normals of the boundary edges, (nb, 2)."""
        tri, loc = self.boundary_edge_triangles
        t = self.triangles[tri]
        a = self.vertices[t[np.arange(len(t)), (loc + 1) % 3]]
        b = self.vertices[t[np.arange(len(t)), (loc + 2) % 3]]
        d = b - a
        # CCW triangle: the domain lies to the left of a->b
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1)[:, None]

    def boundary_edge_lengths(self) -> np.ndarray:
        p = self.vertices[self.boundary_edges]
        return np.linalg.norm(p[:, 1] - p[:, 0], axis=1)

    def total_area(self) -> float:
        return float(self.areas.sum())

    def with_coordinates(self, vertices: np.ndarray) -> "Triangulation":
        return Triangulation(vertices, self.triangles, self.boundary_edges, self.boundary_markers)

    def same_structure(self, other: "Triangulation", atol: float = 0.0) -> bool:
        return (
            self.vertices.shape == other.vertices.shape
            and np.allclose(self.vertices, other.vertices, rtol=0, atol=atol)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary_edges, other.boundary_edges)
            and np.array_equal(self.boundary_markers, other.boundary_markers)
        )


def generate_rect_mesh(
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    n: int,
    pattern: Literal["diagonal", "crisscross"] = "diagonal",
) -> Triangulation:
    """Structured triangulation of ``(x0, x1) x (y0, y1)``.

    ``n`` is the number of cells along the shorter side; the longer side
    gets ``round(n * ratio)`` cells so that cells stay close to square.
    The diagonal pattern cuts every cell from its lower-left to its
    upper-right corner; the crisscross pattern inserts the cell center.
    """
    if n < 1:
        raise MeshError("n must be a positive integer")
    if not (x1 > x0 and y1 > y0):
        raise MeshError("degenerate rectangle")
    if pattern not in ("diagonal", "crisscross"):
        raise MeshError(f"unknown pattern {pattern!r}")
    lx, ly = x1 - x0, y1 - y0
    short = min(lx, ly)
    nx = max(1, int(round(n * lx / short)))
    ny = max(1, int(round(n * ly / short)))
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = [np.stack([X.ravel(), Y.ravel()], axis=1)]

    def vid(i, j):
        return j * (nx + 1) + i

    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    I, J = I.ravel(), J.ravel()
    ll, lr, ur, ul = vid(I, J), vid(I + 1, J), vid(I + 1, J + 1), vid(I, J + 1)
    if pattern == "diagonal":
        tris = np.stack(
            [np.stack([ll, lr, ur], axis=1), np.stack([ll, ur, ul], axis=1)], axis=1
        ).reshape(-1, 3)
    else:
        c = (nx + 1) * (ny + 1) + np.arange(nx * ny)
        centers = np.stack([(xs[I] + xs[I + 1]) / 2, (ys[J] + ys[J + 1]) / 2], axis=1)
        verts.append(centers)
        tris = np.stack(
            [
                np.stack([ll, lr, c], axis=1),
                np.stack([lr, ur, c], axis=1),
                np.stack([ur, ul, c], axis=1),
                np.stack([ul, ll, c], axis=1),
            ],
            axis=1,
        ).reshape(-1, 3)

    bnd, marks = [], []
    for i in range(nx):
        bnd.append((vid(i, 0), vid(i + 1, 0)))
        marks.append(1)
    for j in range(ny):
        bnd.append((vid(nx, j), vid(nx, j + 1)))
        marks.append(2)
    for i in range(nx, 0, -1):
        bnd.append((vid(i, ny), vid(i - 1, ny)))
        marks.append(3)
    for j in range(ny, 0, -1):
        bnd.append((vid(0, j), vid(0, j - 1)))
        marks.append(4)
    return Triangulation(np.concatenate(verts), tris, np.array(bnd), np.array(marks))


def _interior_angles(tri: Triangulation) -> np.ndarray:
    """(nt, 3) interior angle at each local vertex."""
    p = tri.vertices[tri.triangles]
    out = np.empty((tri.n_triangles, 3))
    for i in range(3):
        a = p[:, (i + 1) % 3] - p[:, i]
        b = p[:, (i + 2) % 3] - p[:, i]
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        dot = (a * b).sum(axis=1)
        out[:, i] = np.arctan2(np.abs(cross), dot)
    return out


def _fan_angles(tri: Triangulation, v: int, angles: np.ndarray) -> list[float]:
    fan = tri.vertex_to_triangles[v]
    res = []
    for t in fan:
        loc = int(np.flatnonzero(tri.triangles[t] == v)[0])
        res.append(float(angles[t, loc]))
    return res


def _theta_from_angles(fan_angles: list[float], interior: bool) -> float | None:
    n = len(fan_angles)
    if n < 2:
        return None
    pairs = [fan_angles[i] + fan_angles[i + 1] for i in range(n - 1)]
    if interior:
        pairs.append(fan_angles[-1] + fan_angles[0])
    return max(abs(math.sin(s)) for s in pairs)


def vertex_theta(tri: Triangulation, v: int) -> float | None:
    """Singularity measure of vertex ``v``.

    Maximum of ``|sin(a_i + a_{i+1})|`` over consecutive interior angles of
    the fan around ``v``, closing the cycle for interior vertices.  Returns
    ``None`` for a boundary vertex touching a single triangle.
    """
    angles = _interior_angles(tri)
    interior = not tri.boundary_vertex_mask[v]
    return _theta_from_angles(_fan_angles(tri, v, angles), interior)


@dataclass(frozen=True)
class VertexClassification:
    vertex: int
    location: Literal["interior", "boundary"]
    n_adjacent: int
    theta: float | None
    singular: bool
    possibly_singular: bool


def classify_vertices(tri: Triangulation, convex_domain: bool = True) -> list[VertexClassification]:
    """Classify every vertex by location, fan size and singularity.

    Possibly singular: interior vertices with 4 triangles; boundary
    vertices with 2 triangles (convex domain) or 2 or 3 (nonconvex).
    """
    angles = _interior_angles(tri)
    bmask = tri.boundary_vertex_mask
    flagged_boundary = (2,) if convex_domain else (2, 3)
    out = []
    for v in range(tri.n_vertices):
        fan = tri.vertex_to_triangles[v]
        n = len(fan)
        interior = not bmask[v]
        theta = _theta_from_angles(_fan_angles(tri, v, angles), interior)
        possibly = (n == 4) if interior else (n in flagged_boundary)
        out.append(
            VertexClassification(
                vertex=v,
                location="interior" if interior else "boundary",
                n_adjacent=n,
                theta=theta,
                singular=theta is not None and theta < SINGULAR_TOL,
                possibly_singular=possibly,
            )
        )
    return out


def possibly_singular_vertices(tri: Triangulation, convex_domain: bool = True) -> list[int]:
    return [c.vertex for c in classify_vertices(tri, convex_domain) if c.possibly_singular]


def theta_min(tri: Triangulation) -> float | None:
    """Smallest defined theta over non-singular vertices (diagnostic)."""
    vals = [
        c.theta
        for c in classify_vertices(tri)
        if c.theta is not None and not c.singular
    ]
    return min(vals) if vals else None


@dataclass
class MeshModification:
    """Record of the edits made by :func:`apply_modification`."""

    mode: Literal["none", "corner", "full"] = "none"
    swaps: list[dict] = field(default_factory=list)
    splits: list[dict] = field(default_factory=list)

    def extend(self, other: "MeshModification") -> None:
        self.swaps.extend(other.swaps)
        self.splits.extend(other.splits)


def swap_corner_edges(tri: Triangulation) -> tuple[Triangulation, MeshModification]:
    """Flip the interior edge of every boundary triangle that alone covers a vertex.

    Raises
    ------
    MeshError
        If the flip would produce a triangle with non-positive area.
    """
    report = MeshModification(mode="corner")
    tris = tri.triangles.copy()
    edges, tri_edges = tri.edges
    edge_tris: dict[int, list[int]] = {}
    for ti, row in enumerate(tri_edges.tolist()):
        for e in row:
            edge_tris.setdefault(e, []).append(ti)
    bmask = tri.boundary_vertex_mask
    touched: set[int] = set()
    for v in range(tri.n_vertices):
        fan = tri.vertex_to_triangles[v]
        if not bmask[v] or len(fan) != 1:
            continue
        t = fan[0]
        loc = int(np.flatnonzero(tris[t] == v)[0])
        e = tri_edges[t, loc]
        nbrs = [s for s in edge_tris[e] if s != t]
        if not nbrs:
            raise MeshError(f"vertex {v}: its only triangle has no interior neighbour")
        s = nbrs[0]
        if t in touched or s in touched:
            raise MeshError(f"vertex {v}: corner flips overlap at triangle {t}/{s}")
        a, b = tris[t, (loc + 1) % 3], tris[t, (loc + 2) % 3]
        w = int(next(x for x in tris[s] if x not in (a, b)))
        new_t = np.array([v, a, w])
        new_s = np.array([v, w, b])
        new_areas = _signed_areas(tri.vertices, np.stack([new_t, new_s]))
        if np.any(new_areas <= 0):
            raise MeshError(
                f"vertex {v}: flipping edge ({a}, {b}) would create a non-positive triangle"
            )
        tris[t], tris[s] = new_t, new_s
        touched.update((t, s))
        report.swaps.append(
            {"vertex": int(v), "removed_edge": (int(a), int(b)), "new_edge": (int(v), w),
             "triangles": (int(t), int(s))}
        )
    out = Triangulation(tri.vertices, tris, tri.boundary_edges, tri.boundary_markers)
    if report.swaps:
        bm = out.boundary_vertex_mask
        bad = [v for v in range(out.n_vertices) if bm[v] and len(out.vertex_to_triangles[v]) < 2]
        if bad:
            raise MeshError(f"boundary vertices {bad} still touch a single triangle")
    return out, report


def barycentric_split_at(
    tri: Triangulation, targets: Iterable[int]
) -> tuple[Triangulation, MeshModification]:
    """Split every triangle incident to a target vertex at its barycenter."""
    report = MeshModification(mode="full")
    targets = set(int(v) for v in targets)
    if not targets:
        return tri, report
    to_split = sorted({t for v in targets for t in tri.vertex_to_triangles[v]})
    split_set = set(to_split)
    verts = [tri.vertices]
    new_tris = [t for i, t in enumerate(tri.triangles.tolist()) if i not in split_set]
    nv = tri.n_vertices
    centers = tri.vertices[tri.triangles[to_split]].mean(axis=1)
    verts.append(centers)
    for j, t in enumerate(to_split):
        a, b, c = tri.triangles[t].tolist()
        m = nv + j
        new_tris.extend([[a, b, m], [b, c, m], [c, a, m]])
        report.splits.append({"triangle": int(t), "barycenter": m})
    out = Triangulation(
        np.concatenate(verts), np.array(new_tris), tri.boundary_edges, tri.boundary_markers
    )
    return out, report


_MODE_ALIASES = {"M1": "none", "M2": "corner", "M3": "full", "none": "none",
                 "corner": "corner", "full": "full"}


def apply_modification(
    tri: Triangulation, mode: str = "full", convex: bool = True
) -> tuple[Triangulation, MeshModification]:
    """Mesh modification by mode: ``none`` (M1), ``corner`` (M2) or ``full`` (M3)."""
    try:
        mode = _MODE_ALIASES[mode]
    except KeyError:
        raise MeshError(f"unknown modification mode {mode!r}") from None
    report = MeshModification(mode=mode)
    if mode == "none":
        return tri, report
    tri, sub = swap_corner_edges(tri)
    report.extend(sub)
    if mode == "corner":
        return tri, report
    # splitting only raises fan sizes, but an interior 3-fan next to a target
    # can become a 4-fan, so repeat until the flagged set is empty
    for _ in range(10):
        targets = possibly_singular_vertices(tri, convex)
        if not targets:
            return tri, report
        tri, sub = barycentric_split_at(tri, targets)
        report.extend(sub)
    raise MeshError("barycentric splitting did not remove all possibly singular vertices")


@dataclass
class ValidationReport:
    orientation_violations: list[int]
    conformity_violations: list[str]
    isolated_vertices: list[int]
    min_angle: float
    shape_regularity: float

    @property
    def violations(self) -> list[str]:
        out = [f"triangle {t} not positively oriented" for t in self.orientation_violations]
        out += self.conformity_violations
        out += [f"vertex {v} is isolated" for v in self.isolated_vertices]
        return out

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(tri: Triangulation) -> ValidationReport:
    """Check orientation, conformity and vertex usage; report shape measures."""
    areas = tri.areas
    orient = np.flatnonzero(~(areas > 0)).tolist()
    conf: list[str] = []

    directed: dict[tuple[int, int], int] = {}
    for t in tri.triangles.tolist():
        for i in range(3):
            e = (t[i], t[(i + 1) % 3])
            directed[e] = directed.get(e, 0) + 1
    undirected: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for e, cnt in directed.items():
        if cnt > 1:
            conf.append(f"directed edge {e} used by {cnt} triangles")
        undirected.setdefault((min(e), max(e)), []).append(e)
    bset = {}
    for a, b in tri.boundary_edges.tolist():
        key = (min(a, b), max(a, b))
        if key in bset:
            conf.append(f"boundary edge {key} listed twice")
        bset[key] = True
    for key, uses in undirected.items():
        if len(uses) == 1 and key not in bset:
            conf.append(f"edge {key} has one triangle but is not a boundary edge")
        elif len(uses) == 2 and key in bset:
            conf.append(f"boundary edge {key} is shared by two triangles")
    for key in bset:
        if key not in undirected:
            conf.append(f"boundary edge {key} belongs to no triangle")

    single = [k for k, u in undirected.items() if len(u) == 1]
    if single:
        e = np.array(single)
        pa, pb = tri.vertices[e[:, 0]], tri.vertices[e[:, 1]]
        for (i, j), a, b in zip(single, pa, pb):
            d = b - a
            L2 = d @ d
            rel = tri.vertices - a
            s = rel @ d / L2
            dist = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / math.sqrt(L2)
            hang = np.flatnonzero((s > 1e-12) & (s < 1 - 1e-12) & (dist < 1e-12 * math.sqrt(L2)))
            for v in hang:
                conf.append(f"vertex {int(v)} hangs on edge {(i, j)}")

    used = np.zeros(tri.n_vertices, dtype=bool)
    used[tri.triangles.ravel()] = True
    isolated = np.flatnonzero(~used).tolist()

    angles = _interior_angles(tri) if tri.n_triangles else np.zeros((0, 3))
    L = tri.edge_lengths
    perim = L.sum(axis=1)
    inradius = 2 * np.abs(areas) / perim
    return ValidationReport(
        orientation_violations=orient,
        conformity_violations=conf,
        isolated_vertices=isolated,
        min_angle=float(angles.min()) if angles.size else 0.0,
        shape_regularity=float((inradius / L.max(axis=1)).min()) if len(L) else 0.0,
    )


def write_mesh(tri: Triangulation) -> str:
    out = io.StringIO()
    out.write(f"mesh2d {tri.n_vertices} {tri.n_triangles} {len(tri.boundary_edges)}\n")
    for x, y in tri.vertices.tolist():
        out.write(f"{x!r} {y!r}\n")
    for a, b, c in tri.triangles.tolist():
        out.write(f"{a} {b} {c}\n")
    for (a, b), m in zip(tri.boundary_edges.tolist(), tri.boundary_markers.tolist()):
        out.write(f"{a} {b} {m}\n")
    return out.getvalue()


def read_mesh(text: str) -> Triangulation:
    """Parse the ``mesh2d`` text format (``#`` starts a comment)."""
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            lines.append((no, s.split()))
    if not lines:
        raise MeshFormatError("empty input", 1)
    no, head = lines[0]
    if len(head) != 4 or head[0] != "mesh2d":
        raise MeshFormatError("expected header 'mesh2d <nv> <nt> <nb>'", no)
    try:
        nv, nt, nb = (int(x) for x in head[1:])
    except ValueError:
        raise MeshFormatError("header counts must be integers", no) from None
    if min(nv, nt, nb) < 0:
        raise MeshFormatError("negative count in header", no)
    if nt == 0:
        raise MeshFormatError("empty mesh", no)
    body = lines[1:]
    if len(body) != nv + nt + nb:
        last = body[-1][0] if body else no
        raise MeshFormatError(f"expected {nv + nt + nb} data lines, found {len(body)}", last)

    def ints(no, parts, n, bound=None):
        if len(parts) != n:
            raise MeshFormatError(f"expected {n} fields", no)
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise MeshFormatError("non-integer index", no) from None
        if bound is not None and any(v < 0 or v >= bound for v in vals):
            raise MeshFormatError("vertex index out of range", no)
        return vals

    verts = []
    for no, parts in body[:nv]:
        if len(parts) != 2:
            raise MeshFormatError("expected 2 coordinates", no)
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise MeshFormatError("non-numeric coordinate", no) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise MeshFormatError("non-finite coordinate", no)
        verts.append((x, y))
    tris = [ints(no, parts, 3, nv) for no, parts in body[nv:nv + nt]]
    bnd, marks = [], []
    for no, parts in body[nv + nt:]:
        a, b, m = ints(no, parts, 3)
        if not (0 <= a < nv and 0 <= b < nv):
            raise MeshFormatError("vertex index out of range", no)
        if m < 0:
            raise MeshFormatError("negative boundary marker", no)
        bnd.append((a, b))
        marks.append(m)
    return Triangulation(np.array(verts), np.array(tris), np.array(bnd).reshape(-1, 2), np.array(marks))
