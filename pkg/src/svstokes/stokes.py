"""Stokes solvers: mixed Scott-Vogelius, Taylor-Hood, iterated penalty.

Sign convention of the mixed problem::

    nu (grad u, grad v) - (p, div v) = (f, v)
                         (div u, q)  = 0,       u = g_h on the boundary

The iterated penalty method (IPM) works in the velocity space only.  With
``phi_0 = 0`` it solves, for ``i = 1, 2, ...``::

    nu (grad u_i, grad v) + rho (div u_i, div v) = (f, v) + (div phi_{i-1}, div v)
    phi_i = phi_{i-1} - rho u_i

and recovers the pressure as ``p_i = div phi_i``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal

import numpy as np

from .assembly import (
    apply_dirichlet,
    assemble_div_coupling,
    assemble_graddiv,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    constrain_matrix,
    lift_vector,
)
from .boundary import BoundaryData, make_boundary_data
from .fespace import FeFunction, FeSpace, project_dg_values, scalar_dg, scalar_lagrange, vector_lagrange
from .linalg import factor_spd, solve_saddle
from .manufactured import ManufacturedCase, divergence_norm, error_norms, mean_value
from .mesh import Triangulation
from .quadrature import quadrature_rule

log = logging.getLogger(__name__)


@dataclass
class StokesConfig:
    nu: float = 1.0
    rho: float = 1e2
    tol: float = 1e-11
    max_iter: int = 100
    method: Literal["mixed-sv", "taylor-hood", "ipm"] = "mixed-sv"
    bc_mode: Literal["lagrange", "compatible"] = "compatible"
    mesh_mod: Literal["none", "corner", "full"] = "full"
    k: int = 4
    ra: float = 1.0
    rho_p: float | None = None  # pressure step of the general Uzawa update; None means rho

    def __post_init__(self):
        for name in ("nu", "rho", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.rho_p is not None and not self.rho_p > 0:
            raise ValueError("rho_p must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveReport:
    method: str
    n_velocity_dofs: int
    n_pressure_dofs: int
    multiplier: float
    residual: float
    boundary_flux: float


def _boundary(cfg: StokesConfig, V: FeSpace, g, bc: BoundaryData | None) -> BoundaryData:
    if bc is not None:
        return bc
    return make_boundary_data(V, g, cfg.bc_mode)


def _solve_mixed(cfg, mesh, g, f, pressure_element, method, bc=None):
    V = FeSpace(mesh, vector_lagrange(cfg.k))
    Q = FeSpace(mesh, pressure_element)
    bc = _boundary(cfg, V, g, bc)
    K = assemble_stiffness(V, cfg.nu)
    B = assemble_div_coupling(V, Q)
    F = assemble_load(V, f)
    sys = apply_dirichlet(K, F, bc)
    keep = np.ones(V.n_dofs)
    keep[bc.dofs] = 0.0
    # symmetric form of the pressure rows: -(div u, q) = 0
    Bn = -B
    g_rhs = -(Bn @ sys.lift.coefficients)
    Bc = Bn.multiply(keep[None, :]).tocsr()
    m = np.asarray(assemble_mass(Q) @ np.ones(Q.n_dofs))
    sol = solve_saddle(sys.matrix, Bc, m, sys.rhs, g_rhs)
    u = FeFunction(V, sol.u)
    p = FeFunction(Q, sol.p)
    rep = SolveReport(method, V.n_dofs, Q.n_dofs, sol.multiplier, sol.residual, bc.flux)
    return u, p, rep


def solve_mixed_sv(cfg: StokesConfig, mesh: Triangulation, g: Callable, f: Callable | None,
                   bc: BoundaryData | None = None):
    """Scott-Vogelius: continuous P_k velocity, discontinuous P_{k-1} pressure.

    On meshes with singular vertices the pressure space is too rich and the
    saddle-point system is singular; :class:`SingularSystemError` is raised.
    """
    return _solve_mixed(cfg, mesh, g, f, scalar_dg(cfg.k - 1), "mixed-sv", bc)


def solve_taylor_hood(cfg: StokesConfig, mesh: Triangulation, g: Callable, f: Callable | None,
                      bc: BoundaryData | None = None):
    """Taylor-Hood: continuous P_k velocity, continuous P_{k-1} pressure."""
    if cfg.k < 2:
        raise ValueError("Taylor-Hood needs k >= 2")
    return _solve_mixed(cfg, mesh, g, f, scalar_lagrange(cfg.k - 1), "taylor-hood", bc)


def solve_graddiv(cfg: StokesConfig, mesh: Triangulation, g: Callable, f: Callable | None,
                  bc: BoundaryData | None = None) -> FeFunction:
    """Velocity of the grad-div stabilized problem (no pressure)."""
    V = FeSpace(mesh, vector_lagrange(cfg.k))
    bc = _boundary(cfg, V, g, bc)
    A = assemble_stiffness(V, cfg.nu) + cfg.rho * assemble_graddiv(V)
    sys = apply_dirichlet(A, assemble_load(V, f), bc)
    return FeFunction(V, factor_spd(sys.matrix).solve(sys.rhs))


def ipm_energy(u: FeFunction, u_prev: FeFunction, nu: float, rho: float, K1=None) -> float:
    """IPM energy ``nu/2 |grad u|^2 + rho/2 |div u|^2 - nu (grad u_prev, grad u)``.

    ``K1`` is the unit-viscosity stiffness matrix of the space; it is
    assembled when not supplied.
    """
    if u.space is not u_prev.space:
        raise ValueError("u and u_prev must share a space")
    if K1 is None:
        K1 = assemble_stiffness(u.space, 1.0)
    a, b = u.coefficients, u_prev.coefficients
    Ka = K1 @ a
    d = divergence_norm(u)
    return float(0.5 * nu * (a @ Ka) + 0.5 * rho * d * d - nu * (b @ Ka))


@dataclass
class RateEstimate:
    theta: float | None
    beta: float | None
    status: Literal["ok", "no-decay", "insufficient"]
    window: tuple[int, int] | None = None


@dataclass
class IpmLog:
    config: dict
    records: list[dict] = field(default_factory=list)
    status: Literal["converged", "max_iter_reached", "running"] = "running"
    theta_obs: float | None = None
    beta_est: float | None = None
    rate_status: str | None = None

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def div_norms(self) -> np.ndarray:
        return np.array([r["div_norm"] for r in self.records])

    def to_json(self, **kw) -> str:
        return json.dumps(
            {
                "config": self.config,
                "records": self.records,
                "status": self.status,
                "theta_obs": self.theta_obs,
                "beta_est": self.beta_est,
            },
            **kw,
        )

    @classmethod
    def from_json(cls, text: str) -> "IpmLog":
        d = json.loads(text)
        return cls(config=d["config"], records=d["records"], status=d["status"],
                   theta_obs=d["theta_obs"], beta_est=d["beta_est"])


def estimate_infsup_from_rate(log_or_norms, nu: float, rho: float, tol: float = 1e-11,
                              min_points: int = 4) -> RateEstimate:
    """Fit the geometric decay of the divergence norms.

    Uses iterates with norms in ``[100 tol, 0.01 * first]``, fits
    ``log ||div u_i||`` linearly in ``i`` and inverts
    ``theta = nu / (nu + rho beta^2)``.
    """
    d = log_or_norms.div_norms if isinstance(log_or_norms, IpmLog) else np.asarray(log_or_norms, float)
    if len(d) >= 2 and d[-1] >= d[0] * (1 - 1e-12):
        return RateEstimate(theta=1.0, beta=0.0, status="no-decay")
    if len(d) == 0 or d[0] <= 0:
        return RateEstimate(None, None, "insufficient")
    i = np.arange(1, len(d) + 1)
    sel = (d >= 100 * tol) & (d <= 0.01 * d[0])
    if sel.sum() < min_points:
        return RateEstimate(None, None, "insufficient")
    slope = np.polyfit(i[sel], np.log(d[sel]), 1)[0]
    theta = float(np.exp(slope))
    win = (int(i[sel][0]), int(i[sel][-1]))
    if theta >= 1:
        return RateEstimate(theta=theta, beta=0.0, status="no-decay", window=win)
    beta = math.sqrt(nu * (1 - theta) / (rho * theta))
    return RateEstimate(theta=theta, beta=beta, status="ok", window=win)


@dataclass
class IpmResult:
    u: FeFunction
    p: FeFunction
    log: IpmLog
    phi: FeFunction
    iterates: list[FeFunction] | None = None


def pressure_from_phi(phi: FeFunction, k: int) -> FeFunction:
    """``div phi`` as a mean-free discontinuous P_{k-1} function.

    The divergence of a P_k field is P_{k-1} on every cell, so the local L2
    projection reproduces it exactly.
    """
    Q = FeSpace(phi.space.mesh, scalar_dg(k - 1))
    rule = quadrature_rule(2 * k)
    p = project_dg_values(Q, phi.divergence_at(rule.points), rule)
    p.coefficients -= mean_value(p)
    return p


def run_ipm(cfg: StokesConfig, mesh: Triangulation, g: Callable, f: Callable | None,
            exact: ManufacturedCase | None = None, bc: BoundaryData | None = None,
            keep_iterates: bool = False, max_iter: int | None = None,
            refactor_each_step: bool = False) -> IpmResult:
    """Iterated penalty method with per-iteration logging.

    The penalized velocity matrix is factored once and reused.  From the
    second step on the solve is done for the increment ``u_i - u_{i-1}``
    (homogeneous boundary values, right-hand side ``-rho_p D u_{i-1}``), which
    is algebraically the same iteration with a lower roundoff floor.  The
    first iterate is exactly the grad-div stabilized solution.  Iteration
    stops when ``||div u_i|| < tol`` or after ``max_iter`` steps; running
    out of iterations is reported in ``log.status``, not raised.
    """
    max_iter = cfg.max_iter if max_iter is None else max_iter
    rho_p = cfg.rho if cfg.rho_p is None else cfg.rho_p
    V = FeSpace(mesh, vector_lagrange(cfg.k))
    bc = _boundary(cfg, V, g, bc)
    K1 = assemble_stiffness(V, 1.0)
    D = assemble_graddiv(V)
    A = assemble_stiffness(V, cfg.nu) + cfg.rho * D
    F = assemble_load(V, f)
    lift = lift_vector(bc)
    Ac = constrain_matrix(A, bc.dofs)
    fact = factor_spd(Ac) if not refactor_each_step else None
    base = F - A @ lift

    phi = np.zeros(V.n_dofs)
    ipm_log = IpmLog(config=cfg.as_dict() | {"n_velocity_dofs": V.n_dofs})
    prev: FeFunction | None = None
    iterates = [] if keep_iterates else None
    u = V.zero()
    x = np.zeros(V.n_dofs)
    for i in range(1, max_iter + 1):
        solver = fact if fact is not None else factor_spd(Ac)
        if i == 1:
            rhs = base.copy()
            rhs[bc.dofs] = bc.values
            x = solver.solve(rhs)
        else:
            # A u_i - A u_{i-1} = D (phi_{i-1} - phi_{i-2}) = -rho_p D u_{i-1}.
            # Solving for the increment keeps the solve error proportional to
            # the (decaying) increment instead of to |u|, which lowers the
            # roundoff floor of the divergence norm.
            rhs = -rho_p * (D @ x)
            rhs[bc.dofs] = 0.0
            x = x + solver.solve(rhs)
        u = FeFunction(V, x)
        phi = phi - rho_p * x
        rec = {"i": i, "div_norm": divergence_norm(u)}
        # J_i(u_i) and J_i(u_{i-1}); only defined from the second step on
        if prev is not None:
            rec["energy"] = ipm_energy(u, prev, cfg.nu, cfg.rho, K1)
            rec["energy_prev"] = ipm_energy(prev, prev, cfg.nu, cfg.rho, K1)
        else:
            rec["energy"] = rec["energy_prev"] = None
        if exact is not None:
            p_i = pressure_from_phi(FeFunction(V, phi), cfg.k)
            er = error_norms(u, p_i, exact)
            rec.update(err_l2_u=er.err_l2_u, err_h1_u=er.err_h1_u, err_l2_p=er.err_l2_p)
        ipm_log.records.append(rec)
        if keep_iterates:
            iterates.append(u)
        prev = u
        if rec["div_norm"] < cfg.tol:
            ipm_log.status = "converged"
            break
    else:
        ipm_log.status = "max_iter_reached"
    est = estimate_infsup_from_rate(ipm_log, cfg.nu, cfg.rho, cfg.tol)
    ipm_log.theta_obs, ipm_log.beta_est, ipm_log.rate_status = est.theta, est.beta, est.status
    phi_fn = FeFunction(V, phi)
    return IpmResult(u=u, p=pressure_from_phi(phi_fn, cfg.k), log=ipm_log, phi=phi_fn,
                     iterates=iterates)
