"""Invariant campaigns run by ``radchemo verify``.

Each check returns a :class:`Check` with the measured margin (positive when
the property holds with room to spare).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import lemma21_check
from .grid import RadialGrid
from .oracle import shoot_stationary
from .stationary import alpha_of_mass, convexity_check, mass_of_alpha, stationary_v, vprime_solve

ORACLE_MATRIX = [(a, vs, n) for a in (0.5, 1.0, 4.0) for vs in (0.5, 1.0) for n in (2, 3, 5)]
BOUNDS_MATRIX = [(a, vs, n) for a in (0.0, 0.5, 1.0, 4.0, 16.0) for vs in (0.5, 1.0) for n in (2, 3, 5)]


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def random_log_profile(rng: np.random.Generator, R: float, terms: int = 4, amplitude: float = 1.0):
    """phi(r) = exp(sum_k a_k cos(k pi r / R)), a_k uniform in [-amplitude, amplitude]."""
    a = rng.uniform(-amplitude, amplitude, size=terms + 1)
    k = np.arange(terms + 1)

    def phi(r):
        r = np.asarray(r, dtype=float)
        return np.exp(np.cos(np.multiply.outer(r, k) * math.pi / R) @ a)

    return phi


def lemma21_battery(count: int, M: int, seed: int, dims=(2, 3, 5), R: float = 1.0) -> Check:
    rng = np.random.default_rng(seed)
    worst, fails = math.inf, 0
    for i in range(count):
        n = dims[i % len(dims)]
        grid = RadialGrid(n, R, M)
        phi = random_log_profile(rng, R)
        res = lemma21_check(grid, grid.sample(phi), float(phi(R)))
        rel = res.margin / max(abs(res.rhs), abs(res.lhs), 1e-300)
        worst = min(worst, rel)
        fails += not res.satisfied
    return Check("lemma21_battery", fails == 0, worst, f"{count} profiles, {fails} violations, M={M}")


def oracle_equivalence(M: int = 2048, tol: float = 1e-6, matrix=ORACLE_MATRIX) -> Check:
    worst = 0.0
    for a, vs, n in matrix:
        grid = RadialGrid(n, 1.0, M)
        res = stationary_v(grid, a, vs)
        ref = shoot_stationary(a, vs, n, 1.0, grid.cell_centers)
        worst = max(worst, float(np.max(np.abs(res.v_alpha - ref))))
    return Check("oracle_equivalence", worst <= tol, tol - worst, f"max sup distance {worst:.3e} at M={M}")


def stationary_bounds(M: int, matrix=BOUNDS_MATRIX) -> tuple[Check, Check]:
    worst_b, worst_c, ok_c = math.inf, math.inf, True
    for a, vs, n in matrix:
        grid = RadialGrid(n, 1.0, M)
        res = stationary_v(grid, a, vs)
        v = res.v_alpha
        worst_b = min(worst_b, float(v.min()), vs + 1e-9 - float(v.max()))
        if a > 0:
            rep = convexity_check(grid, v, a, vs)
            ok_c &= rep.monotone and rep.convex
            worst_c = min(worst_c, rep.min_slope_increment)
    return (
        Check("stationary_bounds", worst_b >= 0, worst_b, "0 <= v_alpha <= v_star + 1e-9"),
        Check("convexity", ok_c, worst_c, "v_r >= 0 and nondecreasing"),
    )


def alpha_ordering(pairs: int, M: int, seed: int, v_star: float = 1.0, n: int = 2) -> Check:
    rng = np.random.default_rng(seed + 1)
    grid = RadialGrid(n, 1.0, M)
    worst = math.inf
    for _ in range(pairs):
        a1, a2 = sorted(rng.uniform(0.0, 10.0, size=2), reverse=True)
        v1 = stationary_v(grid, a1, v_star).v_alpha
        v2 = stationary_v(grid, a2, v_star).v_alpha
        worst = min(worst, float(np.min(v2 + 1e-9 - v1)))
    return Check("alpha_ordering", worst >= 0, worst, f"{pairs} random pairs")


def vprime_bounds(M: int, alphas=(0.5, 1.0, 5.0), v_star: float = 1.0, n: int = 2) -> Check:
    grid = RadialGrid(n, 1.0, M)
    worst = math.inf
    for a in alphas:
        res = stationary_v(grid, a, v_star)
        w = vprime_solve(grid, a, res.v_alpha)
        worst = min(worst, float(-w.max()), float(np.min(w + 1.0 / a)))
    return Check("vprime_bounds", worst >= -1e-9, worst, "0 >= v'_alpha > -1/alpha")


def mass_roundtrip(M: int, alphas=(0.5, 2.0, 8.0), v_star: float = 1.0, n: int = 2) -> Check:
    grid = RadialGrid(n, 1.0, M)
    worst = 0.0
    for a in alphas:
        m = mass_of_alpha(grid, a, v_star)
        back = alpha_of_mass(grid, m, v_star).alpha
        worst = max(worst, abs(back - a) / a)
    return Check("mass_roundtrip", worst <= 1e-8, 1e-8 - worst, f"max relative error {worst:.2e}")


def run_campaign(seed: int = 0, M: int = 512, profiles: int = 100, oracle_M: int = 2048) -> list[Check]:
    checks = [lemma21_battery(profiles, M, seed)]
    checks.extend(stationary_bounds(M))
    checks.append(alpha_ordering(20, M, seed))
    checks.append(vprime_bounds(M))
    checks.append(mass_roundtrip(M))
    checks.append(oracle_equivalence(oracle_M))
    return checks
