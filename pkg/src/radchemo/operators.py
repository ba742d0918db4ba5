"""Discrete radial operators in conservative flux form.

Face k sits at r = k*h (k = 0..M); cell i lies between faces i and i+1.
The face r = 0 has zero area, so the symmetry condition there is built in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import RadialGrid
from .model import f_eps_prime


@dataclass
class TridiagonalSystem:
    """Rows ``sub[i]*x[i-1] + main[i]*x[i] + sup[i]*x[i+1] = rhs[i]``.

    ``sub[0]`` and ``sup[-1]`` are ignored.
    """

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.main * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y

    def dense(self) -> np.ndarray:
        m = len(self.main)
        A = np.diag(self.main)
        A[np.arange(1, m), np.arange(m - 1)] = self.sub[1:]
        A[np.arange(m - 1), np.arange(1, m)] = self.sup[:-1]
        return A


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas algorithm; raises LinAlgError on a zero pivot."""
    arrs = [np.ascontiguousarray(x, dtype=float) for x in (sys.sub, sys.main, sys.sup, sys.rhs)]
    m = len(arrs[1])
    if any(len(x) != m for x in arrs):
        raise ValueError("tridiagonal bands and rhs must have equal length")
    try:
        return kernels.thomas(*arrs)
    except ZeroDivisionError as exc:
        raise np.linalg.LinAlgError(str(exc)) from None


def _parse_bc(bc):
    if bc in ("neumann", "neumann_zero"):
        return "neumann", 0.0
    if isinstance(bc, tuple) and len(bc) == 2 and bc[0] == "dirichlet":
        return "dirichlet", float(bc[1])
    raise ValueError(f"unknown boundary condition {bc!r}")


def diffusion_bands(grid: RadialGrid, bc):
    """Bands of the volume-weighted Laplacian: V_i (Lap f)_i = sub*f[i-1] + main*f[i] + sup*f[i+1] + extra.

    Dirichlet data enter through the ghost value 2g - f[M-1], which puts the
    face value at r = R exactly at g.
    """
    kind, g = _parse_bc(bc)
    k = grid.face_areas / grid.h  # k[0] = 0
    sub = k[:-1].copy()
    sup = k[1:].copy()
    extra = np.zeros(grid.M)
    if kind == "dirichlet":
        sup[-1] = 2.0 * k[-1]
        extra[-1] = 2.0 * k[-1] * g
    else:
        sup[-1] = 0.0
    main = -(sub + sup)
    sup[-1] = 0.0
    return sub, main, sup, extra


def laplacian_radial(grid: RadialGrid, f, bc=("dirichlet", 0.0)) -> np.ndarray:
    f = grid.check(f)
    sub, main, sup, extra = diffusion_bands(grid, bc)
    out = main * f + extra
    out[1:] += sub[1:] * f[:-1]
    out[:-1] += sup[:-1] * f[1:]
    return out / grid.cell_volumes


def upwind_taxis_flux(grid: RadialGrid, u, v, eps: float) -> np.ndarray:
    """Face fluxes u F_eps'(u) v_r with u taken from the upwind cell.

    Both end faces carry zero flux: r = 0 by symmetry, r = R because the
    combined diffusive and taxis flux vanishes there.
    """
    vr = np.diff(v) / grid.h
    up = np.where(vr > 0, u[:-1], u[1:])
    flux = np.zeros(grid.M + 1)
    flux[1:-1] = up * f_eps_prime(up, eps) * vr
    return flux


def drift_flux_divergence(grid: RadialGrid, u, v, eps: float = 0.0) -> np.ndarray:
    """Upwinded div(u F_eps'(u) grad v) at cell centres."""
    u = grid.check(u, "u")
    v = grid.check(v, "v")
    flux = upwind_taxis_flux(grid, u, v, eps) * grid.face_areas
    return np.diff(flux) / grid.cell_volumes


def bernoulli(x):
    """B(x) = x / (e^x - 1), with B(0) = 1."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = np.abs(x) > 1e-12
    out[nz] = x[nz] / np.expm1(x[nz])
    return out


def fd_weights(nodes, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0``."""
    nodes = np.asarray(nodes, dtype=float) - x0
    m = len(nodes)
    V = np.vander(nodes, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(V, rhs)


def boundary_derivatives(grid: RadialGrid, f, boundary_value: float) -> tuple[float, float]:
    """(f_r, f_rr) at r = R from the face value and the three outermost centres."""
    f = grid.check(f)
    h = grid.h
    nodes = np.array([0.0, -0.5, -1.5, -2.5]) * h
    vals = np.array([boundary_value, f[-1], f[-2], f[-3]])
    d1 = fd_weights(nodes, 0.0, 1) @ vals
    d2 = fd_weights(nodes, 0.0, 2) @ vals
    return float(d1), float(d2)


def gradient_radial(grid: RadialGrid, f, boundary_value: float | None = None) -> np.ndarray:
    """f_r at the M+1 faces; zero at r = 0, one-sided second order at r = R."""
    f = grid.check(f)
    h = grid.h
    g = np.empty(grid.M + 1)
    g[0] = 0.0
    g[1:-1] = np.diff(f) / h
    if boundary_value is None:
        g[-1] = (2.0 * f[-1] - 3.0 * f[-2] + f[-3]) / h
    else:
        g[-1] = (8.0 * boundary_value - 9.0 * f[-1] + f[-2]) / (3.0 * h)
    return g


def face_values(grid: RadialGrid, f, boundary_value: float | None = None) -> np.ndarray:
    """Interpolate centre values to faces (even extension at r = 0)."""
    f = grid.check(f)
    out = np.empty(grid.M + 1)
    out[1:-1] = 0.5 * (f[:-1] + f[1:])
    out[0] = (9.0 * f[0] - f[1]) / 8.0
    if boundary_value is None:
        out[-1] = (15.0 * f[-1] - 10.0 * f[-2] + 3.0 * f[-3]) / 8.0
    else:
        out[-1] = boundary_value
    return out


def hessian_log_norm_sq(grid: RadialGrid, v, boundary_value: float | None = None,
                        ghost: str = "cubic") -> np.ndarray:
    """|D^2 ln v|^2 = w_rr^2 + (n-1) (w_r/r)^2 for w = ln v, at cell centres.

    The innermost cell uses w_r/r -> w_rr(0). With a boundary value, the
    outer ghost is either the cubic through the face value (right for
    samples of a smooth function) or the solver's own linear ghost
    2g - v[M-1] (right for discrete Dirichlet solutions, whose outer cell
    is offset by O(h^2) to keep the boundary flux second order).
    """
    v = grid.check(v, "v")
    if np.any(v <= 0) or (boundary_value is not None and boundary_value <= 0):
        raise ValueError("hessian_log_norm_sq needs v > 0")
    w = np.log(v)
    h, r = grid.h, grid.cell_centers
    wext = np.empty(grid.M + 2)
    wext[1:-1] = w
    wext[0] = w[0]
    if boundary_value is None:
        wext[-1] = 4.0 * w[-1] - 6.0 * w[-2] + 4.0 * w[-3] - w[-4]
    elif ghost == "cubic":
        wext[-1] = 3.2 * np.log(boundary_value) - 3.0 * w[-1] + w[-2] - 0.2 * w[-3]
    elif ghost == "linear":
        vg = 2.0 * boundary_value - v[-1]
        if vg <= 0:
            raise ValueError("linear ghost value is nonpositive")
        wext[-1] = np.log(vg)
    else:
        raise ValueError(f"unknown ghost {ghost!r}")
    wrr = (wext[2:] - 2.0 * wext[1:-1] + wext[:-2]) / h**2
    wr_over_r = (wext[2:] - wext[:-2]) / (2.0 * h) / r
    wr_over_r[0] = wrr[0]
    return wrr**2 + (grid.n - 1) * wr_over_r**2
