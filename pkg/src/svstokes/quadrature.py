"""Quadrature on the reference triangle and on intervals.

The reference triangle has vertices (0, 0), (1, 0), (0, 1).  Low degrees use
fully symmetric rules; above degree 5 a collapsed Gauss-Jacobi product rule
is used, which is exact, has positive weights and all points interior.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

MAX_DEGREE = 20


class UnsupportedDegreeError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Points in barycentric coordinates ``(l0, l1, l2)`` and weights.

    ``l1, l2`` are the reference coordinates ``x, y``.  Weights sum to 1/2.
    """

    points: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    @property
    def xy(self) -> np.ndarray:
        return self.points[:, 1:]

    def __len__(self) -> int:
        return len(self.weights)


def _from_xy(xy, w, degree):
    xy = np.asarray(xy, dtype=float)
    bary = np.column_stack([1.0 - xy[:, 0] - xy[:, 1], xy])
    return QuadratureRule(bary, np.asarray(w, dtype=float), degree)


def _radon7() -> QuadratureRule:
    s = np.sqrt(15.0)
    a1, a2 = (6 - s) / 21, (6 + s) / 21
    w1, w2 = (155 - s) / 2400, (155 + s) / 2400
    xy = [(1 / 3, 1 / 3)]
    w = [9 / 80]
    for a, wa in ((a1, w1), (a2, w2)):
        b = 1 - 2 * a
        xy += [(a, a), (b, a), (a, b)]
        w += [wa] * 3
    return _from_xy(xy, w, 5)


def _collapsed(degree: int) -> QuadratureRule:
    n = degree // 2 + 1
    # x-direction carries the (1 - s) Jacobian factor
    s, ws = roots_jacobi(n, 1.0, 0.0)
    t, wt = roots_jacobi(n, 0.0, 0.0)
    s, t = (s + 1) / 2, (t + 1) / 2
    ws, wt = ws / 4, wt / 2
    S, T = np.meshgrid(s, t, indexing="ij")
    W = np.outer(ws, wt)
    x = S
    y = (1 - S) * T
    return _from_xy(np.column_stack([x.ravel(), y.ravel()]), W.ravel(), 2 * n - 1)


@lru_cache(maxsize=None)
def quadrature_rule(degree: int) -> QuadratureRule:
    """Smallest available rule integrating polynomials of ``degree`` exactly."""
    if not 0 <= degree <= MAX_DEGREE:
        raise UnsupportedDegreeError(f"no triangle quadrature of degree {degree}")
    if degree <= 1:
        return _from_xy([(1 / 3, 1 / 3)], [0.5], 1)
    if degree == 2:
        return _from_xy([(1 / 6, 1 / 6), (2 / 3, 1 / 6), (1 / 6, 2 / 3)], [1 / 6] * 3, 2)
    if degree <= 5:
        return _radon7()
    return _collapsed(degree)


@lru_cache(maxsize=None)
def gauss_interval(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points on [0, 1] and weights summing to 1."""
    n = max(1, degree // 2 + 1)
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2
