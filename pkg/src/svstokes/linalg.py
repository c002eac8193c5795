"""Sparse direct and iterative solvers.

Factorizations wrap SuperLU (``scipy.sparse.linalg.splu``).  SPD systems
are factored in symmetric mode with diagonal pivoting and a symmetric
minimum-degree ordering, so the diagonal of ``U`` holds the pivots of an
LDL^T factorization and definiteness can be checked directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class DefinitenessError(np.linalg.LinAlgError):
    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(f"non-positive pivot {value:.3e} at row {pivot}")


class SingularSystemError(np.linalg.LinAlgError):
    pass


def as_csr(A) -> sp.csr_matrix:
    """Finalize to CSR: duplicates summed, sorted columns, no stored zeros."""
    A = sp.csr_matrix(A)
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    return A


class Factorization:
    """Reusable sparse LU factorization.

    Solving with several right-hand sides never refactors.  The object is
    read-only after construction.
    """

    def __init__(self, A, spd: bool = False):
        A = sp.csc_matrix(A)
        self.shape = A.shape
        self.spd = spd
        try:
            if spd:
                self._lu = spla.splu(
                    A,
                    permc_spec="MMD_AT_PLUS_A",
                    diag_pivot_thresh=0.0,
                    options={"SymmetricMode": True},
                )
            else:
                self._lu = spla.splu(A, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SingularSystemError(str(exc)) from exc
        if spd:
            piv = self._lu.U.diagonal()
            bad = np.flatnonzero(~(piv > 0))
            if bad.size:
                # perm_c maps original column -> pivot position
                j = int(bad[0])
                row = int(np.flatnonzero(self._lu.perm_c == j)[0])
                raise DefinitenessError(row, float(piv[j]))

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(np.asarray(b, dtype=float))

    @property
    def pivot_range(self) -> tuple[float, float]:
        d = np.abs(self._lu.U.diagonal())
        return float(d.min()), float(d.max())


def factor_spd(A) -> Factorization:
    return Factorization(A, spd=True)


def solve(fact: Factorization, b: np.ndarray) -> np.ndarray:
    return fact.solve(b)


def relative_residual(A, x, b) -> float:
    """``||Ax - b||_inf / (||A||_inf ||x||_inf)``."""
    r = A @ x - b
    scale = spla.norm(A, np.inf) * np.abs(x).max()
    return float(np.abs(r).max() / scale) if scale > 0 else float(np.abs(r).max())


@dataclass
class SaddleSolution:
    u: np.ndarray
    p: np.ndarray
    multiplier: float
    residual: float


def saddle_matrix(K, B, m) -> sp.csr_matrix:
    nu, npr = K.shape[0], B.shape[0]
    m = sp.csr_matrix(np.asarray(m, dtype=float).reshape(-1, 1))
    return as_csr(
        sp.bmat(
            [
                [K, B.T, None],
                [B, None, m],
                [None, m.T, sp.csr_matrix((1, 1))],
            ],
            format="csr",
        )
    )


def solve_saddle(K, B, m, f, g, residual_tol: float = 1e-8,
                 pivot_tol: float = 1e-12, refine_steps: int = 3) -> SaddleSolution:
    """Solve ``[K B^T 0; B 0 m; 0 m^T 0] (u, p, lam) = (f, g, 0)``.

    The LU solve is followed by up to ``refine_steps`` rounds of iterative
    refinement, stopping once the residual no longer shrinks.  Partial
    pivoting on the indefinite matrix loses a few digits from N = 32 on, and
    one refinement step recovers them at the cost of a triangular solve.

    ``m`` is the pressure mass against constants, so ``m^T p = 0`` fixes the
    pressure mean.  Dirichlet constraints must already be applied.

    Raises
    ------
    SingularSystemError
        When the factorization hits an exact zero pivot, a pivot below
        ``pivot_tol`` times the largest one (a rank-deficient system that
        roundoff made invertible), or the computed solution does not satisfy
        the system.
    """
    nu, npr = K.shape[0], B.shape[0]
    A = saddle_matrix(K, B, m)
    rhs = np.concatenate([f, g, [0.0]])
    fact = Factorization(A)
    lo, hi = fact.pivot_range
    if lo < pivot_tol * hi:
        raise SingularSystemError(
            f"saddle-point matrix is numerically singular (pivot ratio {lo / hi:.1e})")
    x = fact.solve(rhs)
    r = rhs - A @ x
    rnorm = np.abs(r).max()
    for _ in range(refine_steps):
        x_new = x + fact.solve(r)
        r_new = rhs - A @ x_new
        if not np.abs(r_new).max() < rnorm:
            break
        x, r, rnorm = x_new, r_new, np.abs(r_new).max()
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("saddle-point solve produced non-finite values")
    res = relative_residual(A, x, rhs)
    if res > residual_tol:
        raise SingularSystemError(f"saddle-point residual {res:.2e} exceeds {residual_tol:.0e}")
    return SaddleSolution(u=x[:nu], p=x[nu:nu + npr], multiplier=float(x[-1]), residual=res)


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    converged: bool


def cg_solve(A, b, tol: float = 1e-10, maxit: int | None = None,
             jacobi: bool = True) -> CGResult:
    """Conjugate gradients with optional diagonal preconditioning."""
    b = np.asarray(b, dtype=float)
    count = 0

    def cb(_):
        nonlocal count
        count += 1

    M = None
    if jacobi:
        d = A.diagonal()
        M = sp.diags(1.0 / d)
    x, info = spla.cg(A, b, rtol=tol, atol=0.0, maxiter=maxit, M=M, callback=cb)
    return CGResult(x=x, iterations=count, converged=info == 0)


def write_matrix_market(path, A, comment: str = "") -> None:
    scipy.io.mmwrite(path, sp.coo_matrix(A), comment=comment)
