"""Divergence-free Stokes discretizations on triangles.

Scott-Vogelius and Taylor-Hood mixed solvers, the iterated penalty method,
flux-compatible boundary interpolation and singular-vertex mesh repair.
"""
from .boundary import compatible_interpolate, lagrange_boundary, make_boundary_data
from .fespace import FeFunction, FeSpace, scalar_dg, scalar_lagrange, vector_lagrange
from .manufactured import ErrorReport, error_norms, manufactured
from .mesh import Triangulation, apply_modification, classify_vertices, generate_rect_mesh
from .stokes import StokesConfig, run_ipm, solve_graddiv, solve_mixed_sv, solve_taylor_hood

__all__ = [
    "ErrorReport",
    "FeFunction",
    "FeSpace",
    "StokesConfig",
    "Triangulation",
    "apply_modification",
    "classify_vertices",
    "compatible_interpolate",
    "error_norms",
    "generate_rect_mesh",
    "lagrange_boundary",
    "make_boundary_data",
    "manufactured",
    "run_ipm",
    "scalar_dg",
    "scalar_lagrange",
    "solve_graddiv",
    "solve_mixed_sv",
    "solve_taylor_hood",
    "vector_lagrange",
]
