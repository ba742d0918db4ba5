"""Radial steady states: u = alpha*exp(v) with Lap v = alpha v e^v, v = v_star on the boundary.

The profile v_alpha is computed by Picard iteration on the linearized
problem Lap w = alpha e^{v_k} w, started from the upper barrier v = v_star.
The steady mass m(alpha) = int alpha e^{v_alpha} is strictly increasing, which
:func:`alpha_of_mass` inverts by bisection.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import RadialGrid, integrate
from .operators import TridiagonalSystem, diffusion_bands, laplacian_radial, solve_tridiagonal

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, msg, last_update=None):
        super().__init__(msg)
        self.last_update = last_update


@dataclass
class StationaryResult:
    alpha: float
    v_star: float
    grid: RadialGrid
    v_alpha: np.ndarray
    u: np.ndarray
    mass: float
    iterations: int
    final_update: float
    defect: float = math.nan
    updates: list[float] = field(default_factory=list)
    trace: list[tuple[float, float]] = field(default_factory=list)

    @property
    def contraction_rate(self) -> float:
        """Geometric mean ratio of successive Picard updates (observed, not guaranteed)."""
        upd = [x for x in self.updates if x > 0]
        if len(upd) < 3:
            return math.nan
        return (upd[-1] / upd[0]) ** (1.0 / (len(upd) - 1))

    def invariant_flags(self, slack: float = 1e-9) -> dict[str, bool]:
        v, a = self.v_alpha, self.alpha
        vol = self.grid.volume
        return {
            "v_nonnegative": bool(v.min() >= -slack),
            "v_below_v_star": bool(v.max() <= self.v_star + slack),
            "u_equals_alpha_exp_v": bool(np.max(np.abs(self.u - a * np.exp(v))) <= 1e-14 * max(1.0, self.u.max(initial=0.0))),
            "mass_lower_bound": bool(self.mass >= a * vol * (1 - 1e-12) - slack),
            "radially_nondecreasing": bool(np.all(np.diff(v) >= -slack)),
        }

    def profile_table(self) -> np.ndarray:
        """Columns r, v, u, v_r (v_r from centred differences at the centres)."""
        g = self.grid
        vr = np.gradient(np.concatenate(([self.v_alpha[0]], self.v_alpha, [2 * self.v_star - self.v_alpha[-1]])), g.h)[1:-1]
        return np.column_stack([g.cell_centers, self.v_alpha, self.u, vr])

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "v_star": self.v_star,
            "n": self.grid.n,
            "R": self.grid.R,
            "M": self.grid.M,
            "mass": self.mass,
            "iterations": self.iterations,
            "final_update": self.final_update,
            "defect": self.defect,
            "contraction_rate": None if math.isnan(self.contraction_rate) else self.contraction_rate,
            "invariants": self.invariant_flags(),
        }


def solve_linearized(grid: RadialGrid, v_frozen, alpha: float, v_star: float) -> np.ndarray:
    """Solve Lap w = alpha e^{v_frozen} w in the ball, w = v_star at r = R."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    v_frozen = grid.check(v_frozen, "v_frozen")
    if not np.all(np.isfinite(v_frozen)):
        raise ValueError("v_frozen must be finite")
    sub, main, sup, extra = diffusion_bands(grid, ("dirichlet", v_star))
    react = alpha * np.exp(v_frozen) * grid.cell_volumes
    return solve_tridiagonal(TridiagonalSystem(sub, main - react, sup, -extra))


def reconstruct_u(alpha: float, v_alpha) -> np.ndarray:
    return alpha * np.exp(np.asarray(v_alpha, dtype=float))


def nonlinear_defect(grid: RadialGrid, v, alpha: float, v_star: float) -> float:
    """sup |Lap v - alpha v e^v| with the discrete Laplacian."""
    return float(np.max(np.abs(laplacian_radial(grid, v, ("dirichlet", v_star)) - alpha * v * np.exp(v))))


def stationary_v(
    grid: RadialGrid,
    alpha: float,
    v_star: float,
    tol: float = 1e-12,
    max_iter: int = 1000,
) -> StationaryResult:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if v_star < 0:
        raise ValueError("v_star must be >= 0")
    v = np.full(grid.M, float(v_star))
    updates = []
    for it in range(1, max_iter + 1):
        v_new = solve_linearized(grid, v, alpha, v_star)
        upd = float(np.max(np.abs(v_new - v)))
        updates.append(upd)
        v = v_new
        if not np.all(np.isfinite(v)):
            raise ConvergenceError("Picard iterate became non-finite", upd)
        if upd <= tol:
            break
        # rounding floor: updates no longer contract but are already tiny
        if it > 2 and upd >= updates[-2] and upd <= 1e3 * tol:
            break
    else:
        raise ConvergenceError(
            f"Picard iteration did not reach tol={tol:g} in {max_iter} steps "
            f"(last update {updates[-1]:.3e})",
            updates[-1],
        )
    u = reconstruct_u(alpha, v)
    res = StationaryResult(
        alpha=float(alpha), v_star=float(v_star), grid=grid, v_alpha=v, u=u,
        mass=integrate(grid, u), iterations=it, final_update=upd,
        defect=nonlinear_defect(grid, v, alpha, v_star), updates=updates,
    )
    flags = res.invariant_flags()
    if not (flags["v_nonnegative"] and flags["v_below_v_star"]):
        raise ConvergenceError(f"stationary profile left [0, v_star]: {flags}", upd)
    log.debug("alpha=%g: %d Picard steps, rate %.3g", alpha, it, res.contraction_rate)
    return res


def mass_of_alpha(grid: RadialGrid, alpha: float, v_star: float, tol: float = 1e-12) -> float:
    """m(alpha) = int alpha exp(v_alpha)."""
    return stationary_v(grid, alpha, v_star, tol=tol).mass


def alpha_of_mass(
    grid: RadialGrid,
    m_target: float,
    v_star: float,
    tol: float = 1e-13,
    picard_tol: float = 1e-13,
    max_bisect: int = 200,
) -> StationaryResult:
    """Invert the mass map by bisection on [0, m/|B| + delta].

    The bracket is valid because m(alpha) >= alpha |B|. The returned result
    carries the bisection trace as (alpha, m(alpha)) pairs.
    """
    if not m_target >= 0:
        raise ValueError("target mass must be >= 0")
    if m_target == 0:
        res = stationary_v(grid, 0.0, v_star, tol=picard_tol)
        res.trace = [(0.0, 0.0)]
        return res
    lo, hi = 0.0, m_target / grid.volume * (1.0 + 1e-9) + 1e-300
    trace = []
    best = None
    scale = max(1.0, m_target)
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        res = stationary_v(grid, mid, v_star, tol=picard_tol)
        trace.append((mid, res.mass))
        if best is None or abs(res.mass - m_target) < abs(best.mass - m_target):
            best = res
        if res.mass < m_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi and abs(best.mass - m_target) <= tol * scale * 10:
            break
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    best.trace = trace
    return best


def mass_derivative(grid: RadialGrid, res: StationaryResult) -> float:
    """m'(alpha) = int e^{v_alpha} (1 + alpha v'_alpha)."""
    if res.alpha == 0:
        return integrate(grid, np.exp(res.v_alpha))
    w = vprime_solve(grid, res.alpha, res.v_alpha)
    return integrate(grid, np.exp(res.v_alpha) * (1.0 + res.alpha * w))


def vprime_solve(grid: RadialGrid, alpha: float, v_alpha) -> np.ndarray:
    """d v_alpha / d alpha: Lap w = v e^v + alpha e^v (1 + v) w, w = 0 at r = R."""
    if not alpha > 0:
        raise ValueError("vprime_solve needs alpha > 0")
    v = grid.check(v_alpha, "v_alpha")
    sub, main, sup, _ = diffusion_bands(grid, ("dirichlet", 0.0))
    vol = grid.cell_volumes
    react = alpha * np.exp(v) * (1.0 + v) * vol
    return solve_tridiagonal(TridiagonalSystem(sub, main - react, sup, vol * v * np.exp(v)))


def vr_quadrature(grid: RadialGrid, v_alpha, alpha: float, v_star: float, r=None, nodes: int = 8) -> np.ndarray:
    """v_r(r) = alpha r int_0^1 t^{n-1} v(rt) e^{v(rt)} dt by Gauss-Legendre in t.

    v is interpolated piecewise linearly from the centre values, extended
    evenly through r = 0 and pinned to v_star at r = R.
    """
    v = grid.check(v_alpha)
    r = grid.cell_centers if r is None else np.asarray(r, dtype=float)
    rs = np.concatenate(([-grid.cell_centers[0]], grid.cell_centers, [grid.R]))
    vs = np.concatenate(([v[0]], v, [v_star]))
    # panels in t so each panel spans about one cell at the largest r
    panels = max(1, int(math.ceil(grid.M * r.max() / grid.R)))
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    t = (0.5 * (edges[:-1, None] + edges[1:, None]) + 0.5 * np.diff(edges)[:, None] * x).ravel()
    wt = (0.5 * np.diff(edges)[:, None] * w).ravel()
    rt = np.abs(np.outer(r, t))
    vv = np.interp(rt, rs, vs)
    integrand = t ** (grid.n - 1) * vv * np.exp(vv)
    return alpha * r * (integrand @ wt)


@dataclass
class ConvexityReport:
    monotone: bool
    convex: bool
    min_slope: float
    min_slope_increment: float
    quadrature_mismatch: float


def convexity_check(grid: RadialGrid, v_alpha, alpha: float, v_star: float, tol: float = 1e-9) -> ConvexityReport:
    """Check v_r >= 0 and v_r nondecreasing on the faces, and compare v_r with its integral form."""
    v = grid.check(v_alpha)
    h = grid.h
    slope = np.empty(grid.M + 1)
    slope[0] = 0.0
    slope[1:-1] = np.diff(v) / h
    slope[-1] = 2.0 * (v_star - v[-1]) / h
    incr = np.diff(slope)
    scale = max(1.0, float(np.max(np.abs(slope))))
    # centred differences at the interior centres vs the quadrature form
    vr_fd = (v[2:] - v[:-2]) / (2.0 * h)
    vr_q = vr_quadrature(grid, v, alpha, v_star, r=grid.cell_centers[1:-1])
    return ConvexityReport(
        monotone=bool(slope.min() >= -tol * scale),
        convex=bool(incr.min() >= -tol * scale),
        min_slope=float(slope.min()),
        min_slope_increment=float(incr.min()),
        quadrature_mismatch=float(np.max(np.abs(vr_fd - vr_q))),
    )
