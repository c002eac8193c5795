"""Manufactured Stokes solution on (6, 12) x (0, 6) and error norms.

Velocity is the curl of ``psi = log|x| - |x|^2 / 2``::

    u = (1 - 1/r^2) (-y, x),   r^2 = x^2 + y^2

so ``div u = 0`` and ``-Laplace u = curl(-Laplace psi) = curl(2) = 0``;
with ``nu = 1`` the load is just ``f = grad p`` where::

    p = 10 Ra sin(pi x / 40) sin(pi y / 20)
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .fespace import FeFunction
from .quadrature import quadrature_rule

DOMAIN = (6.0, 12.0, 0.0, 6.0)
_ORIGIN_GUARD = 1e-6


def _r2(x, y):
    r2 = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
    if np.any(r2 < _ORIGIN_GUARD**2):
        raise ValueError("manufactured solution is singular at the origin")
    return r2


@dataclass(frozen=True)
class ManufacturedCase:
    ra: float = 1.0
    nu: float = 1.0
    domain: tuple[float, float, float, float] = DOMAIN

    def u(self, x, y):
        s = 1.0 - 1.0 / _r2(x, y)
        return np.stack(np.broadcast_arrays(-s * y, s * x), axis=-1)

    def grad_u(self, x, y):
        """``[..., c, d] = d u_c / d x_d``.

        u1 = -y + y/r^2:  d/dx = -2xy/r^4,  d/dy = -1 + 1/r^2 - 2y^2/r^4
        u2 =  x - x/r^2:  d/dx = 1 - 1/r^2 + 2x^2/r^4,  d/dy = 2xy/r^4
        """
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        r2 = _r2(x, y)
        r4 = r2 * r2
        g = np.empty(x.shape + (2, 2))
        g[..., 0, 0] = -2 * x * y / r4
        g[..., 0, 1] = -1 + 1 / r2 - 2 * y * y / r4
        g[..., 1, 0] = 1 - 1 / r2 + 2 * x * x / r4
        g[..., 1, 1] = 2 * x * y / r4
        return g

    def p(self, x, y):
        return 10.0 * self.ra * np.sin(np.pi * x / 40) * np.sin(np.pi * y / 20)

    def grad_p(self, x, y):
        a, b = np.pi / 40, np.pi / 20
        c = 10.0 * self.ra
        gx = c * a * np.cos(a * x) * np.sin(b * y)
        gy = c * b * np.sin(a * x) * np.cos(b * y)
        return np.stack(np.broadcast_arrays(gx, gy), axis=-1)

    def f(self, x, y):
        return self.grad_p(x, y)

    def g(self, x, y):
        return self.u(x, y)


def manufactured(ra: float = 1.0) -> ManufacturedCase:
    return ManufacturedCase(ra=ra)


@dataclass
class ErrorReport:
    N: int
    h: float
    err_l2_u: float
    err_h1_u: float
    err_h1semi_u: float
    div_norm: float
    err_l2_p: float
    iterations: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _quad(space, degree):
    rule = quadrature_rule(degree)
    _, _, det = space.jacobians
    w = rule.weights[None, :] * np.abs(det)[:, None]
    x = space.map_points(rule.points)
    return rule, w, x


def divergence_norm(u: FeFunction, degree: int | None = None) -> float:
    """``||div u||_{L2}`` by elementwise quadrature.

    Evaluated pointwise rather than as ``u^T D u`` so that tiny norms are
    not lost to cancellation.
    """
    rule, w, _ = _quad(u.space, degree if degree is not None else 2 * u.space.degree)
    d = u.divergence_at(rule.points)
    return float(np.sqrt((w * d * d).sum()))


def l2_norm(fn: FeFunction, degree: int | None = None) -> float:
    rule, w, _ = _quad(fn.space, degree if degree is not None else 2 * fn.space.degree)
    v = fn.values_at(rule.points)
    sq = v * v if v.ndim == 2 else (v * v).sum(axis=-1)
    return float(np.sqrt((w * sq).sum()))


def gradient_norm(fn: FeFunction, degree: int | None = None) -> float:
    rule, w, _ = _quad(fn.space, degree if degree is not None else 2 * fn.space.degree)
    g = fn.gradients_at(rule.points)
    sq = (g * g).reshape(g.shape[0], g.shape[1], -1).sum(axis=-1)
    return float(np.sqrt((w * sq).sum()))


def mean_value(fn: FeFunction, degree: int | None = None) -> float:
    rule, w, _ = _quad(fn.space, degree if degree is not None else 2 * fn.space.degree)
    return float((w * fn.values_at(rule.points)).sum() / w.sum())


def error_norms(u_h: FeFunction, p_h: FeFunction | None, case: ManufacturedCase,
                quad_degree: int | None = None, N: int = 0,
                iterations: int | None = None) -> ErrorReport:
    """Velocity and pressure errors against the closed forms.

    Both pressures are shifted to zero mean before differencing.
    """
    k = u_h.space.degree
    degree = quad_degree if quad_degree is not None else 2 * k + 4
    if degree < 2 * k + 4:
        raise ValueError(f"quadrature degree must be at least {2 * k + 4}")
    rule, w, x = _quad(u_h.space, degree)
    eu = u_h.values_at(rule.points) - case.u(x[..., 0], x[..., 1])
    eg = u_h.gradients_at(rule.points) - case.grad_u(x[..., 0], x[..., 1])
    l2 = float(np.sqrt((w * (eu * eu).sum(axis=-1)).sum()))
    semi = float(np.sqrt((w * (eg * eg).sum(axis=(-1, -2))).sum()))
    div = divergence_norm(u_h, degree)
    err_p = float("nan")
    if p_h is not None:
        area = w.sum()
        pe = case.p(x[..., 0], x[..., 1])
        ph = p_h.values_at(rule.points)
        diff = (ph - (w * ph).sum() / area) - (pe - (w * pe).sum() / area)
        err_p = float(np.sqrt((w * diff * diff).sum()))
    return ErrorReport(
        N=N,
        h=u_h.space.mesh.h,
        err_l2_u=l2,
        err_h1_u=float(np.hypot(l2, semi)),
        err_h1semi_u=semi,
        div_norm=div,
        err_l2_p=err_p,
        iterations=iterations,
    )
