"""Independent reference computations for tests.

Nothing here shares discretization code with the finite-volume solvers:
the shooting solver integrates the radial ODE with RK4 and the quadrature
is composite Gauss-Legendre on [0, R].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from . import kernels
from .grid import sphere_area


class BracketError(RuntimeError):
    pass


@dataclass
class ShootingConfig:
    s_lo: float = 0.0
    s_hi: float | None = None  # defaults to v_star
    steps: int = 20000
    tol: float = 1e-13


def shoot_boundary_value(alpha: float, n: int, R: float, s: float, steps: int = 20000) -> float:
    """v(R) for the radial solution with v(0) = s, v_r(0) = 0."""
    r0 = 1e-6 * R
    v, _ = kernels.shoot(float(alpha), int(n), float(s), r0, np.array([R]), (R - r0) / steps)
    return float(v[-1])


def shoot_stationary(
    alpha: float,
    v_star: float,
    n: int,
    R: float,
    r_eval,
    cfg: ShootingConfig | None = None,
) -> np.ndarray:
    """Profile of (r^{n-1} v_r)_r = alpha r^{n-1} v e^v with v(R) = v_star, sampled at ``r_eval``."""
    cfg = cfg or ShootingConfig()
    if alpha < 0 or v_star < 0:
        raise ValueError("alpha and v_star must be >= 0")
    r_eval = np.asarray(r_eval, dtype=float)
    r0 = 1e-6 * R
    hmax = (R - r0) / cfg.steps
    s_lo = cfg.s_lo
    s_hi = v_star if cfg.s_hi is None else cfg.s_hi
    if not 0 <= s_lo <= s_hi:
        raise ValueError("need 0 <= s_lo <= s_hi")

    def miss(s):
        d = shoot_boundary_value(alpha, n, R, s, cfg.steps) - v_star
        # blow-up before r = R counts as overshooting the boundary value
        return d if math.isfinite(d) else math.inf

    if v_star == 0:
        s = 0.0
    elif alpha == 0:
        s = v_star
    else:
        if miss(s_hi) < 0:
            s_hi = 2 * s_hi + 1e-3
            if miss(s_hi) < 0:
                raise BracketError(f"v(R; s={s_hi}) stays below v_star={v_star}")
        f_lo = miss(s_lo)
        if f_lo > 0:
            raise BracketError(f"v(R; s={s_lo}) already exceeds v_star")
        s = s_lo if f_lo == 0 else bisect(miss, s_lo, s_hi, xtol=cfg.tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    order = np.argsort(r_eval)
    pts = np.maximum(r_eval[order], r0)
    v, _ = kernels.shoot(float(alpha), int(n), float(s), r0, np.ascontiguousarray(pts), hmax)
    out = np.empty_like(v)
    out[order] = v
    return out


def fine_quadrature(f, n: int, R: float, coarse_M: int = 64, refine: int = 10, order: int = 6) -> float:
    """omega_{n-1} int_0^R r^{n-1} f(r) dr on ``coarse_M * refine`` Gauss-Legendre panels."""
    panels = coarse_M * refine
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, R, panels + 1)
    half = 0.5 * np.diff(edges)
    r = (0.5 * (edges[:-1, None] + edges[1:, None]) + half[:, None] * x).ravel()
    wr = (half[:, None] * w).ravel()
    vals = np.asarray(f(r), dtype=float) * np.ones_like(r)
    return float(sphere_area(n) * np.sum(wr * r ** (n - 1) * vals))


def linearized_profile(v_star: float, R: float, r) -> np.ndarray:
    """v_star sinh(r) / (r sinh R): radial solution of Lap v = v in 3D."""
    r = np.asarray(r, dtype=float)
    return v_star * np.sinh(r) / (r * math.sinh(R))
