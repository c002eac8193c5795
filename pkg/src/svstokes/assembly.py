"""Assembly of Stokes bilinear forms and loads, Dirichlet elimination.

Element integrals are evaluated for all cells at once; the global matrix is
built from COO triplets and finalized to sorted CSR with duplicates summed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .fespace import FeFunction, FeSpace, reference_basis
from .linalg import as_csr
from .quadrature import quadrature_rule


def _scatter(row_dofs, col_dofs, local, shape, order=None) -> sp.csr_matrix:
    if order is not None:
        row_dofs, col_dofs, local = row_dofs[order], col_dofs[order], local[order]
    nr, nc = row_dofs.shape[1], col_dofs.shape[1]
    rows = np.repeat(row_dofs[:, :, None], nc, axis=2).ravel()
    cols = np.repeat(col_dofs[:, None, :], nr, axis=1).ravel()
    return as_csr(sp.coo_matrix((local.ravel(), (rows, cols)), shape=shape))


def _weights(space: FeSpace, rule):
    _, _, det = space.jacobians
    return rule.weights[None, :] * np.abs(det)[:, None]


def _vector_divergence(space: FeSpace, rule) -> np.ndarray:
    """div of each local vector basis function, (nt, nq, 2n)."""
    _, g = space.tabulate(rule.points)
    nt, nq, n, _ = g.shape
    return g.reshape(nt, nq, 2 * n)  # interleaving (x, y) matches d/dx, d/dy


def assemble_stiffness(vspace: FeSpace, nu: float = 1.0, quad_degree: int | None = None,
                       order=None) -> sp.csr_matrix:
    """``nu * (grad u, grad v)`` on a vector (or scalar) Lagrange space."""
    rule = quadrature_rule(quad_degree if quad_degree is not None else 2 * vspace.degree)
    w = _weights(vspace, rule)
    _, g = vspace.tabulate(rule.points)
    S = nu * np.einsum("tq,tqad,tqbd->tab", w, g, g)
    if vspace.n_components == 2:
        nt, n, _ = S.shape
        L = np.zeros((nt, n, 2, n, 2))
        L[:, :, 0, :, 0] = S
        L[:, :, 1, :, 1] = S
        S = L.reshape(nt, 2 * n, 2 * n)
    d = vspace.cell_dofs
    return _scatter(d, d, S, (vspace.n_dofs, vspace.n_dofs), order)


def assemble_graddiv(vspace: FeSpace, quad_degree: int | None = None, order=None) -> sp.csr_matrix:
    """``(div u, div v)`` on a vector Lagrange space."""
    rule = quadrature_rule(quad_degree if quad_degree is not None else 2 * vspace.degree)
    w = _weights(vspace, rule)
    dv = _vector_divergence(vspace, rule)
    L = np.einsum("tq,tqa,tqb->tab", w, dv, dv)
    d = vspace.cell_dofs
    return _scatter(d, d, L, (vspace.n_dofs, vspace.n_dofs), order)


def assemble_div_coupling(vspace: FeSpace, pspace: FeSpace, quad_degree: int | None = None,
                          order=None) -> sp.csr_matrix:
    """``B[q, a] = (div psi_a, chi_q)``, shape (pressure dofs, velocity dofs)."""
    rule = quadrature_rule(quad_degree if quad_degree is not None else 2 * vspace.degree)
    w = _weights(vspace, rule)
    dv = _vector_divergence(vspace, rule)
    pv, _ = reference_basis(pspace.degree, rule.points)
    L = np.einsum("tq,qp,tqa->tpa", w, pv, dv)
    return _scatter(pspace.cell_dofs, vspace.cell_dofs, L, (pspace.n_dofs, vspace.n_dofs), order)


def assemble_mass(space: FeSpace, quad_degree: int | None = None, order=None) -> sp.csr_matrix:
    """Scalar mass matrix ``(chi_p, chi_q)``."""
    rule = quadrature_rule(quad_degree if quad_degree is not None else 2 * space.degree)
    w = _weights(space, rule)
    v, _ = reference_basis(space.degree, rule.points)
    L = np.einsum("tq,qa,qb->tab", w, v, v)
    d = space.cell_dofs
    return _scatter(d, d, L, (space.n_dofs, space.n_dofs), order)


assemble_pressure_mass = assemble_mass


def assemble_load(vspace: FeSpace, f: Callable | None, quad_degree: int | None = None) -> np.ndarray:
    """``F[a] = (f, psi_a)`` with ``f(x, y)`` returning (..., 2) for vector spaces."""
    if f is None:
        return np.zeros(vspace.n_dofs)
    rule = quadrature_rule(quad_degree if quad_degree is not None else 2 * vspace.degree + 4)
    w = _weights(vspace, rule)
    x = vspace.map_points(rule.points)
    fv = np.asarray(f(x[..., 0], x[..., 1]), dtype=float)
    v, _ = reference_basis(vspace.degree, rule.points)
    if vspace.n_components == 2:
        fv = np.broadcast_to(fv, x.shape)
        L = np.einsum("tq,qa,tqc->tac", w, v, fv).reshape(len(w), -1)
    else:
        fv = np.broadcast_to(fv, x.shape[:-1])
        L = np.einsum("tq,qa,tq->ta", w, v, fv)
    out = np.zeros(vspace.n_dofs)
    np.add.at(out, vspace.cell_dofs.ravel(), L.ravel())
    return out


def constants_vector(pspace: FeSpace) -> np.ndarray:
    """``m[q] = integral of chi_q``; ``m @ p`` is the integral of ``p``."""
    M = assemble_mass(pspace)
    return np.asarray(M @ np.ones(pspace.n_dofs))


@dataclass
class AssembledSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    constrained_dofs: np.ndarray
    lift: FeFunction

    @property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(len(self.rhs), dtype=bool)
        mask[self.constrained_dofs] = False
        return np.flatnonzero(mask)


def lift_vector(bc) -> np.ndarray:
    """Boundary data extended by zero at interior DOFs."""
    lift = np.zeros(bc.space.n_dofs)
    lift[bc.dofs] = bc.values
    return lift


def constrain_matrix(A, dofs: np.ndarray) -> sp.csr_matrix:
    """Zero rows and columns of ``dofs`` and put ones on their diagonal."""
    n = A.shape[0]
    keep = np.ones(n)
    keep[dofs] = 0.0
    P = sp.diags(keep)
    return as_csr(P @ A @ P + sp.diags(1.0 - keep))


def apply_dirichlet(matrix, rhs: np.ndarray, bc) -> AssembledSystem:
    """Symmetric elimination of Dirichlet DOFs with lifting.

    ``bc`` is a :class:`~svstokes.boundary.BoundaryData`.
    """
    space = bc.space
    if matrix.shape[0] != space.n_dofs:
        raise ValueError("boundary data lives on a different space than the matrix")
    extra = np.setdiff1d(bc.dofs, space.boundary_dofs)
    if extra.size:
        raise ValueError(f"boundary data prescribes non-boundary DOFs {extra[:5].tolist()}")
    lift = lift_vector(bc)
    r = np.asarray(rhs, dtype=float) - matrix @ lift
    r[bc.dofs] = bc.values
    return AssembledSystem(
        matrix=constrain_matrix(matrix, bc.dofs),
        rhs=r,
        constrained_dofs=np.asarray(bc.dofs),
        lift=FeFunction(space, lift),
    )
