"""Experiment runners for the manufactured benchmark.

Every runner returns plain rows (lists of dicts) so the caller decides how
to serialize; :func:`to_csv` gives the canonical ``%.6e`` CSV form.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .linalg import DefinitenessError, SingularSystemError
from .manufactured import DOMAIN, ErrorReport, error_norms, manufactured
from .mesh import Triangulation, apply_modification, generate_rect_mesh
from .quadrature import quadrature_rule
from .stokes import IpmLog, StokesConfig, run_ipm, solve_mixed_sv, solve_taylor_hood

log = logging.getLogger(__name__)

MESH_MODES = {"none": "M1", "corner": "M2", "full": "M3", "M1": "M1", "M2": "M2", "M3": "M3"}
REPORT_COLUMNS = ["N", "h", "err_l2_u", "err_h1_u", "err_h1semi_u", "div_norm", "err_l2_p",
                  "iterations", "status"]


def build_mesh(N: int, mesh_mod: str = "full", pattern: str = "diagonal",
               convex: bool = True) -> Triangulation:
    """Structured mesh of the benchmark square, then the requested modification."""
    if mesh_mod not in MESH_MODES:
        raise ValueError(f"unknown mesh modification {mesh_mod!r}")
    x0, x1, y0, y1 = DOMAIN
    tri = generate_rect_mesh(x0, x1, y0, y1, N, pattern)
    tri, _ = apply_modification(tri, MESH_MODES[mesh_mod], convex)
    return tri


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.6e" % v
    return str(v)


def to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """Header line then one line per row, ``%.6e`` for floats."""
    columns = columns or (list(rows[0]) if rows else REPORT_COLUMNS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _failed_row(N: int, exc: Exception) -> dict:
    row = {c: math.nan for c in REPORT_COLUMNS}
    row.update(N=N, iterations=None, status=f"error: {exc}")
    return row


def run_convergence(method: str = "mixed-sv", bc_mode: str = "compatible", mesh_mod: str = "full",
                    rho: float = 1e2, ra: float = 1.0, Ns=(4, 8, 16), k: int = 4, nu: float = 1.0,
                    tol: float = 1e-11, max_iter: int = 100, pattern: str = "diagonal",
                    logs: list | None = None) -> list[dict]:
    """One :class:`ErrorReport` row per ``N``.

    Solver failures are caught and recorded in the ``status`` column.  For
    the IPM, the per-iteration logs are appended to ``logs`` when given.
    """
    case = manufactured(ra)
    cfg = StokesConfig(nu=nu, rho=rho, tol=tol, max_iter=max_iter, method=method,
                       bc_mode=bc_mode, mesh_mod=mesh_mod, k=k, ra=ra)
    rows = []
    for N in Ns:
        mesh = build_mesh(N, mesh_mod, pattern)
        try:
            if method == "ipm":
                res = run_ipm(cfg, mesh, case.g, case.f)
                rep = error_norms(res.u, res.p, case, N=N, iterations=res.log.iterations)
                status = res.log.status
                if logs is not None:
                    logs.append({"N": N, **_log_dict(res.log)})
            elif method in ("mixed-sv", "taylor-hood"):
                solver = solve_mixed_sv if method == "mixed-sv" else solve_taylor_hood
                u, p, _ = solver(cfg, mesh, case.g, case.f)
                rep = error_norms(u, p, case, N=N)
                status = "ok"
            else:
                raise ValueError(f"unknown method {method!r}")
        except (SingularSystemError, DefinitenessError) as exc:
            log.error("N=%d: %s", N, exc)
            rows.append(_failed_row(N, exc))
            continue
        rows.append(rep.as_dict() | {"status": status})
    return rows


def _log_dict(ipm_log: IpmLog) -> dict:
    return json.loads(ipm_log.to_json())


def run_pressure_robustness(N: int = 16, ras=(10.0, 1e2, 1e3, 1e4), k: int = 4,
                            mesh_mod: str = "full", pattern: str = "diagonal") -> list[dict]:
    """Velocity gradient and pressure errors of SV and TH as ``Ra`` grows."""
    mesh = build_mesh(N, mesh_mod, pattern)
    rows = []
    for ra in sorted(ras):
        case = manufactured(ra)
        cfg = StokesConfig(k=k, ra=ra)
        for method, solver in (("mixed-sv", solve_mixed_sv), ("taylor-hood", solve_taylor_hood)):
            u, p, _ = solver(cfg, mesh, case.g, case.f)
            rep: ErrorReport = error_norms(u, p, case, N=N)
            rows.append({"Ra": float(ra), "method": method,
                         "err_h1semi_u": rep.err_h1semi_u, "err_l2_p": rep.err_l2_p})
    return rows


@dataclass
class MeshModRun:
    mode: str
    log: IpmLog
    linf_div: float
    cell_div: np.ndarray  # (nt,) max |div u_h| per triangle
    centroids: np.ndarray  # (nt, 2)


def elementwise_divergence(u) -> np.ndarray:
    """Max of ``|div u|`` per triangle over a degree-``2k`` quadrature set and the vertices."""
    rule = quadrature_rule(2 * u.space.degree)
    pts = np.vstack([rule.points, np.eye(3)])
    return np.abs(u.divergence_at(pts)).max(axis=1)


def run_mesh_mod_study(N: int = 16, rho: float = 1e2, tol: float = 1e-11, max_iter: int = 100,
                       k: int = 4, pattern: str = "diagonal") -> dict[str, MeshModRun]:
    """IPM on the unmodified, corner-swapped and fully modified meshes.

    Unmodified meshes are expected to hit ``max_iter``; this is reported in
    the log status, not raised.
    """
    case = manufactured(1.0)
    out = {}
    for mode in ("M1", "M2", "M3"):
        mesh = build_mesh(N, mode, pattern)
        cfg = StokesConfig(rho=rho, tol=tol, max_iter=max_iter, method="ipm", k=k)
        res = run_ipm(cfg, mesh, case.g, case.f)
        cell = elementwise_divergence(res.u)
        cen = mesh.vertices[mesh.triangles].mean(axis=1)
        out[mode] = MeshModRun(mode, res.log, float(cell.max()), cell, cen)
    return out


def mesh_mod_rows(study: dict[str, MeshModRun]) -> list[dict]:
    return [
        {"mode": r.mode, "iterations": r.log.iterations, "status": r.log.status,
         "final_div_norm": float(r.log.div_norms[-1]), "min_div_norm": float(r.log.div_norms.min()),
         "linf_div": r.linf_div}
        for r in study.values()
    ]


def mesh_mod_dump(study: dict[str, MeshModRun]) -> dict:
    """JSON-ready logs and elementwise divergence fields."""
    return {
        mode: {
            "log": _log_dict(r.log),
            "linf_div": r.linf_div,
            "cells": [{"x": float(c[0]), "y": float(c[1]), "abs_div": float(d)}
                      for c, d in zip(r.centroids, r.cell_div)],
        }
        for mode, r in study.items()
    }


def convergence_orders(rows: list[dict], key: str, floor: float = 1e-9) -> list[float]:
    """``log2`` ratios of ``key`` between successive rows (N doubling) above ``floor``."""
    out = []
    for a, b in zip(rows, rows[1:]):
        ea, eb = a[key], b[key]
        if ea > floor and eb > floor:
            out.append(math.log(ea / eb) / math.log(b["N"] / a["N"]))
    return out
