"""Radially symmetric chemotaxis-consumption solver with Dirichlet signal data.

Time-dependent runs of the eps-regularized system, the stationary theory
(u = alpha e^v, Picard solve for v_alpha, mass map inversion) and runtime
diagnostics for the energy analysis.
"""
from .grid import RadialGrid, integrate, make_grid
from .kernels import BACKEND
from .model import InitialData, InvalidInitialData, ModelParams, f_eps, f_eps_prime, validate_initial

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "InitialData",
    "InvalidInitialData",
    "ModelParams",
    "RadialGrid",
    "f_eps",
    "f_eps_prime",
    "integrate",
    "make_grid",
    "validate_initial",
]
