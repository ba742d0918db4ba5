"""Discrete versions of the quantities in the energy analysis.

Gradients live on faces and are integrated with dual-cell weights; cell
quantities use the midpoint rule.

How v meets its boundary value depends on where the field came from, so
:func:`record` takes a ``closure``:

* ``"scheme"`` (solver states): the outer cell of a discrete Dirichlet
  solution sits O(h^2) off the smooth profile so that the boundary flux
  2(v_star - v[M-1])/h is second order. That flux gives v_r(R); v_rr(R)
  follows from the v-equation on the boundary, where v_t = 0:
  v_rr = F_eps(u) v_star - (n-1) v_r / R. Polynomial stencils through the
  outer cells are O(1) wrong for v_rr on such data.
* ``"smooth"`` (samples of a smooth profile): one-sided polynomial stencils.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import xlogy

from .evolve import SimState
from .grid import RadialGrid, integrate, integrate_faces
from .model import ModelParams, boundary_extrapolate, f_eps, f_eps_prime
from .operators import boundary_derivatives, face_values, gradient_radial, hessian_log_norm_sq

FISHER_FLOOR = 1e-14


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    v_max: float
    v_grad_l2: float
    entropy: float
    energy_y: float | None
    fisher: float | None
    hesslog: float | None
    cross: float | None
    grad4: float
    bdry1: float | None
    bdry2: float
    bdry3: float | None
    u_boundary: float
    int_u_power: float
    int_grad_u_power: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def _or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


def record(grid: RadialGrid, state: SimState, params: ModelParams, closure: str = "scheme") -> DiagnosticsRecord:
    if closure not in ("scheme", "smooth"):
        raise ValueError(f"unknown closure {closure!r}")
    u = grid.check(state.u, "u")
    v = grid.check(state.v, "v")
    n, vs, eps = grid.n, params.v_star, params.eps
    A = grid.boundary_area

    ur = gradient_radial(grid, u)
    uR = boundary_extrapolate(grid, u)
    vr = gradient_radial(grid, v, vs)
    if closure == "scheme":
        vr[-1] = 2.0 * (vs - v[-1]) / grid.h
        # no-flux condition supplies u_r at r = R
        ur[-1] = max(uR, 0.0) * f_eps_prime(max(uR, 0.0), eps) * vr[-1]
    vf = face_values(grid, v, vs)
    uf = face_values(grid, u)

    entropy = integrate(grid, xlogy(u, np.maximum(u, 0.0)))
    vr2 = vr**2
    with np.errstate(divide="ignore", invalid="ignore"):
        if vf.min() > 0:
            grad_over_v = integrate_faces(grid, vr2 / vf)
            energy_y = entropy + 0.5 * grad_over_v
            cross = 0.5 * integrate_faces(grid, f_eps(np.maximum(uf, 0.0), eps) / vf * vr2)
        else:
            energy_y = cross = None
        if u.min() >= FISHER_FLOOR and uf.min() > 0:
            fisher = integrate_faces(grid, ur**2 / uf)
        else:
            fisher = None
    ghost = "linear" if closure == "scheme" else "cubic"
    if v.min() > 0 and vs > 0 and 2.0 * vs - v[-1] > 0:
        hesslog = integrate(grid, v * hessian_log_norm_sq(grid, v, vs, ghost=ghost))
    else:
        hesslog = None

    if closure == "scheme":
        dvr = vr[-1]
        dvrr = f_eps(max(uR, 0.0), eps) * vs - (n - 1) * dvr / grid.R
    else:
        dvr, dvrr = boundary_derivatives(grid, v, vs)
    d_grad2 = 2.0 * dvr * dvrr  # d/dr (v_r^2) at r = R
    bdry1 = A * d_grad2 / vs if vs > 0 else None
    bdry2 = A * dvr**2 * d_grad2
    bdry3 = A * dvr**3 / vs**2 if vs > 0 else None

    p_u = (n + 2) / n
    p_g = (n + 2) / (n + 1)
    return DiagnosticsRecord(
        t=float(state.t),
        mass=integrate(grid, u),
        v_max=float(v.max()),
        v_grad_l2=integrate_faces(grid, vr2),
        entropy=float(entropy),
        energy_y=_or_none(energy_y),
        fisher=_or_none(fisher),
        hesslog=_or_none(hesslog),
        cross=_or_none(cross),
        grad4=integrate_faces(grid, vr2**2),
        bdry1=_or_none(bdry1),
        bdry2=float(bdry2),
        bdry3=_or_none(bdry3),
        u_boundary=uR,
        int_u_power=integrate(grid, np.maximum(u, 0.0) ** p_u),
        int_grad_u_power=integrate_faces(grid, np.abs(ur) ** p_g),
    )


def check_record(rec: DiagnosticsRecord, mass0: float, v_bound: float, volume: float) -> list[str]:
    """Violated record invariants, as messages (empty when all hold)."""
    bad = []
    if abs(rec.mass - mass0) > 1e-10 * max(abs(mass0), 1e-300) and not (mass0 == 0 and rec.mass == 0):
        bad.append(f"t={rec.t:g}: mass {rec.mass:.15g} != initial {mass0:.15g}")
    if rec.v_max > v_bound + 1e-9:
        bad.append(f"t={rec.t:g}: v_max {rec.v_max:.12g} > {v_bound:.12g}")
    floor = -volume / math.e - 1e-9
    if rec.entropy < floor:
        bad.append(f"t={rec.t:g}: entropy {rec.entropy:.6g} below -|B|/e")
    if rec.energy_y is not None and rec.energy_y < floor:
        bad.append(f"t={rec.t:g}: energy {rec.energy_y:.6g} below -|B|/e")
    return bad


def dissipation_balance(rec: DiagnosticsRecord) -> float:
    """fisher + hesslog + cross - bdry1/2 + bdry3/2, which equals -dy/dt."""
    parts = (rec.fisher, rec.hesslog, rec.cross, rec.bdry1, rec.bdry3)
    if any(p is None for p in parts):
        raise ValueError(f"record at t={rec.t} lacks a term of the energy identity")
    return rec.fisher + rec.hesslog + rec.cross - 0.5 * rec.bdry1 + 0.5 * rec.bdry3


def energy_identity_residual(records) -> np.ndarray:
    """Per-interval residual of dy/dt + dissipation = boundary terms.

    The time derivative is a forward difference; the other terms are averaged
    over the two interval endpoints.
    """
    records = list(records)
    if len(records) < 2:
        raise ValueError("need at least two records")
    t = np.array([r.t for r in records])
    if any(r.energy_y is None for r in records):
        raise ValueError("energy functional undefined on some record")
    y = np.array([r.energy_y for r in records])
    d = np.array([dissipation_balance(r) for r in records])
    return np.diff(y) / np.diff(t) + 0.5 * (d[:-1] + d[1:])


@dataclass
class Lemma21Result:
    lhs: float
    rhs: float
    tol: float
    satisfied: bool

    @property
    def margin(self) -> float:
        return self.rhs + self.tol - self.lhs


def lemma21_check(grid: RadialGrid, phi, boundary_value: float | None = None, tol_factor: float = 1.0) -> Lemma21Result:
    """Compare int |grad phi|^4/phi^3 with (2+sqrt n)^2 int phi |D^2 ln phi|^2 + 2 boundary term.

    The discrete comparison allows ``tol_factor * h * (|lhs| + |rhs|)`` plus
    a rounding floor proportional to ``|B| max(phi)``.
    """
    phi = grid.check(phi, "phi")
    if phi.min() <= 0 or (boundary_value is not None and boundary_value <= 0):
        raise ValueError("lemma21_check needs phi > 0")
    g = boundary_extrapolate(grid, phi) if boundary_value is None else float(boundary_value)
    pr = gradient_radial(grid, phi, g)
    pf = face_values(grid, phi, g)
    lhs = integrate_faces(grid, pr**4 / pf**3)
    dr, _ = boundary_derivatives(grid, phi, g)
    bterm = 2.0 * grid.boundary_area * dr**3 / g**2
    rhs = (2.0 + math.sqrt(grid.n)) ** 2 * integrate(grid, phi * hessian_log_norm_sq(grid, phi, g)) + bterm
    tol = tol_factor * grid.h * (abs(lhs) + abs(rhs)) + 1e-12 * grid.volume * float(phi.max())
    return Lemma21Result(float(lhs), float(rhs), float(tol), bool(lhs <= rhs + tol))


def _window_integral(t, y, a, b):
    ts = np.concatenate(([a], t[(t > a) & (t < b)], [b]))
    return float(trapezoid(np.interp(ts, t, y), ts))


def spacetime_bounds(records, window: float = 1.0) -> dict[str, np.ndarray]:
    """Windowed space-time integrals of u^{(n+2)/n}, |grad u|^{(n+2)/(n+1)} and |grad v|^4."""
    records = list(records)
    t = np.array([r.t for r in records])
    if len(t) < 2 or t[-1] - t[0] < window * (1 - 1e-12):
        raise ValueError("trajectory does not cover one window")
    starts = np.arange(t[0], t[-1] - window * (1 - 1e-12) + 1e-12, window)
    out = {"window_start": starts}
    for key in ("int_u_power", "int_grad_u_power", "grad4"):
        y = np.array([getattr(r, key) for r in records])
        out[key] = np.array([_window_integral(t, y, s, s + window) for s in starts])
    return out


def boundary_window_sums(records, window: float = 1.0) -> np.ndarray:
    """Windowed integrals of the boundary source bdry1/2 - bdry3/2."""
    records = list(records)
    t = np.array([r.t for r in records])
    h = np.array([0.5 * r.bdry1 - 0.5 * r.bdry3 for r in records])
    if t[-1] - t[0] < window:
        return np.array([_window_integral(t, h, t[0], t[-1])])
    starts = np.arange(t[0], t[-1] - window + 1e-12, window)
    return np.array([_window_integral(t, h, s, s + window) for s in starts])


def energy_bound_check(records, window: float = 1.0, tol: float = 1e-8) -> tuple[bool, float]:
    """Is y(t) <= y(0) + max(0, sup windowed boundary source)/(1 - 1/e) + tol along the run?"""
    records = list(records)
    y = np.array([r.energy_y for r in records])
    bound = y[0] + max(0.0, float(boundary_window_sums(records, window).max())) / (1 - math.exp(-1)) + tol
    return bool(y.max() <= bound), float(bound - y.max())
