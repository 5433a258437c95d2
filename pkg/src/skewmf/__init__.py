"""Variational solver and verification harness for the skew-symmetric
mean-field Liouville system with purely mutual coupling on compact
surfaces of unit volume."""

__version__ = "0.1.0"

from .surface import (Field, SurfaceGrid, SurfaceKind, build_grid, dirichlet,
                      distance, gradient_pairing, integrate, inverse_laplacian,
                      laplacian)
from .problem import (ProblemData, Vortex, desingularize, enumerate_sigma,
                      green_function, lambda_membership)
from .functionals import (I_rho, InnerSolveResult, J_full, J_tilde,
                          envelope_gradient, holder_chain_check, inner_minimize)
from .solver import (SolveReport, continuation, find_k1_solution,
                     minimize_outer, newton_el, residual)
from .bubbles import (Barycenter, BubbleParams, bubble_field, bubble_raw,
                      concentration_profile, energy_asymptotics, mt_check,
                      phi_map)
from .config import RunConfig

__all__ = [
    "Field", "SurfaceGrid", "SurfaceKind", "build_grid", "integrate",
    "dirichlet", "gradient_pairing", "laplacian", "inverse_laplacian",
    "distance", "ProblemData", "Vortex", "green_function", "desingularize",
    "enumerate_sigma", "lambda_membership", "J_full", "I_rho", "J_tilde",
    "inner_minimize", "envelope_gradient", "holder_chain_check",
    "InnerSolveResult", "SolveReport", "residual", "minimize_outer",
    "newton_el", "continuation", "find_k1_solution", "Barycenter",
    "BubbleParams", "bubble_field", "bubble_raw", "energy_asymptotics",
    "phi_map", "concentration_profile", "mt_check", "RunConfig",
]
