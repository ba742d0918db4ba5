"""Time integration of the regularized chemotaxis-consumption system.

u_t = Lap u - div(u F_eps'(u) grad v),  v_t = Lap v - F_eps(u) v,
with zero total u-flux and v = v_star at r = R.

Each step solves two tridiagonal systems. Diffusion and the consumption
term are implicit. The taxis term has two treatments:

* ``"fitted"`` (default): exponentially fitted (Scharfetter-Gummel) face
  fluxes with the drift velocity F_eps'(u) v_r frozen at the old step. The
  u-matrix is an M-matrix with zero column sums, so positivity and mass
  hold for every dt, and u = alpha e^v is an exact discrete steady state.
* ``"upwind"``: explicit first-order upwind fluxes, positive under a CFL
  bound; its steady state differs from alpha e^v at O(h).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import RadialGrid, integrate
from .model import InitialData, ModelParams, f_eps, f_eps_prime, validate_initial
from .operators import (
    TridiagonalSystem,
    bernoulli,
    diffusion_bands,
    solve_tridiagonal,
    upwind_taxis_flux,
)

log = logging.getLogger(__name__)

TAXIS_SCHEMES = ("fitted", "upwind")


class InvariantViolation(RuntimeError):
    """A structural property failed after a step; ``t`` is the time reached."""

    def __init__(self, msg: str, t: float):
        super().__init__(f"t={t:.6g}: {msg}")
        self.t = t


@dataclass
class SimState:
    t: float
    u: np.ndarray
    v: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.t, self.u.copy(), self.v.copy())


@dataclass
class StepControl:
    dt_max: float = 1e-2
    cfl_safety: float = 0.5
    t_end: float = 1.0
    output_every: float = 0.1  # 0 records every step

    def __post_init__(self):
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0,1]")
        if not self.t_end >= 0:
            raise ValueError("t_end must be >= 0")
        if not self.output_every >= 0:
            raise ValueError("output_every must be >= 0")


def choose_dt(grid: RadialGrid, state: SimState, params: ModelParams, ctl: StepControl, taxis: str = "fitted") -> float:
    """Largest admissible step from the current fields."""
    c = ctl.cfl_safety
    dt = ctl.dt_max
    vr = np.abs(np.diff(state.v)) / grid.h
    vr_R = 2.0 * abs(params.v_star - state.v[-1]) / grid.h
    vr_max = max(float(vr.max(initial=0.0)), vr_R)
    if vr_max > 0:
        dt = min(dt, c * grid.h / vr_max)
    F_max = float(np.max(f_eps(state.u, params.eps)))
    if F_max > 0:
        dt = min(dt, c / F_max)
    if taxis == "upwind":
        # outflow through both faces of a cell must not exceed its content
        vr_f = np.diff(state.v) / grid.h
        A = grid.face_areas
        out = np.zeros(grid.M)
        out[:-1] += A[1:-1] * np.maximum(vr_f, 0.0)
        out[1:] += A[1:-1] * np.maximum(-vr_f, 0.0)
        rate = float(np.max(out / grid.cell_volumes))
        if rate > 0:
            dt = min(dt, c / rate)
    return dt


def _u_system_fitted(grid, u, v, eps, dt):
    ubar = 0.5 * (u[:-1] + u[1:])
    delta = f_eps_prime(ubar, eps) * np.diff(v)
    k = grid.face_areas[1:-1] / grid.h
    bp, bm = k * bernoulli(delta), k * bernoulli(-delta)
    vol = grid.cell_volumes
    main = vol / dt
    main[:-1] += bm
    main[1:] += bp
    sub = np.zeros(grid.M)
    sup = np.zeros(grid.M)
    sub[1:] = -bm
    sup[:-1] = -bp
    return TridiagonalSystem(sub, main, sup, vol * u / dt)


def _u_system_upwind(grid, u, v, eps, dt):
    sub, main, sup, _ = diffusion_bands(grid, "neumann")
    vol = grid.cell_volumes
    flux = upwind_taxis_flux(grid, u, v, eps) * grid.face_areas
    rhs = vol * u / dt - np.diff(flux)
    return TridiagonalSystem(-sub, vol / dt - main, -sup, rhs)


def step(grid: RadialGrid, state: SimState, params: ModelParams, ctl: StepControl,
         dt: float | None = None, taxis: str = "fitted") -> SimState:
    """Advance one step of length ``dt`` (chosen by :func:`choose_dt` if omitted)."""
    if taxis not in TAXIS_SCHEMES:
        raise ValueError(f"taxis must be one of {TAXIS_SCHEMES}")
    if dt is None:
        dt = choose_dt(grid, state, params, ctl, taxis)
    u, v = state.u, state.v
    build = _u_system_fitted if taxis == "fitted" else _u_system_upwind
    u_new = solve_tridiagonal(build(grid, u, v, params.eps, dt))

    sub, main, sup, extra = diffusion_bands(grid, ("dirichlet", params.v_star))
    vol = grid.cell_volumes
    diag = vol / dt - main + vol * f_eps(u, params.eps)
    v_new = solve_tridiagonal(TridiagonalSystem(-sub, diag, -sup, vol * v / dt + extra))
    t_new = state.t + dt
    if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(v_new))):
        raise InvariantViolation("non-finite values (reduce dt_max)", t_new)
    return SimState(t_new, u_new, v_new)


@dataclass
class Trajectory:
    states: list[SimState] = field(default_factory=list)
    records: list = field(default_factory=list)
    steps: int = 0
    dts: list[float] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> SimState:
        return self.states[-1]


def check_state(grid: RadialGrid, state: SimState, mass0: float, v_bound: float,
                mass_rtol: float = 1e-10) -> list[str]:
    bad = []
    umax = float(np.max(np.abs(state.u))) if state.u.size else 0.0
    if state.u.min() < -1e-14 * max(umax, 1.0):
        bad.append(f"u became negative (min {state.u.min():.3e})")
    if state.v.min() < 0:
        bad.append(f"v became negative (min {state.v.min():.3e})")
    if state.v.max() > v_bound + 1e-9:
        bad.append(f"max v = {state.v.max():.12g} exceeds max(|v0|, v_star) = {v_bound:.12g}")
    mass = integrate(grid, state.u)
    if abs(mass - mass0) > mass_rtol * max(abs(mass0), 1e-300):
        if not (mass0 == 0 and abs(mass) <= 1e-300):
            bad.append(f"mass drifted from {mass0:.15g} to {mass:.15g}")
    return bad


def run(
    grid: RadialGrid,
    initial: InitialData,
    params: ModelParams,
    ctl: StepControl,
    taxis: str = "fitted",
    validate: bool = True,
    boundary_tol: float = 1e-10,
    diagnostics: bool = True,
    keep_states: bool = True,
    callback=None,
) -> Trajectory:
    """Integrate to ``ctl.t_end``, snapshotting every ``ctl.output_every``.

    Invariants are checked after every step; any breach raises
    :class:`InvariantViolation` carrying the failing time.
    """
    from .diagnostics import record as make_record

    if validate:
        initial = validate_initial(initial, params, grid, boundary_tol=boundary_tol)
    u0 = grid.check(initial.u0, "u0").copy()
    v0 = grid.check(initial.v0, "v0").copy()
    state = SimState(0.0, u0, v0)
    mass0 = integrate(grid, u0)
    v_bound = max(float(np.max(v0)), params.v_star)
    traj = Trajectory()

    def emit(s):
        rec = make_record(grid, s, params) if diagnostics else None
        if keep_states or not traj.states:
            traj.states.append(s.copy())
        else:
            traj.states[-1:] = [s.copy()]
        if rec is not None:
            traj.records.append(rec)
        if callback is not None:
            callback(s, rec)

    emit(state)
    every = ctl.output_every
    next_out = every if every > 0 else math.inf
    t_end = ctl.t_end
    while state.t < t_end * (1 - 1e-14):
        dt = choose_dt(grid, state, params, ctl, taxis)
        target = min(t_end, next_out)
        if state.t + dt >= target * (1 - 1e-12) or target - (state.t + dt) < 1e-12 * max(1.0, target):
            dt = target - state.t
        new = step(grid, state, params, ctl, dt=dt, taxis=taxis)
        if abs(new.t - target) < 1e-12 * max(1.0, target):
            new.t = target
        bad = check_state(grid, new, mass0, v_bound)
        if bad:
            raise InvariantViolation("; ".join(bad), new.t)
        state = new
        traj.steps += 1
        traj.dts.append(dt)
        if every == 0:
            emit(state)
        elif state.t >= next_out * (1 - 1e-12) or state.t >= t_end:
            emit(state)
            while next_out <= state.t * (1 + 1e-12):
                next_out += every
    if every == 0 and traj.states[-1].t != state.t:
        emit(state)
    log.info("run finished: %d steps to t=%g", traj.steps, state.t)
    return traj
