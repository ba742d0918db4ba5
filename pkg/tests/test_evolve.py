import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import radchemo.evolve as evolve
from radchemo.evolve import InvariantViolation, SimState, StepControl, choose_dt, run, step
from radchemo.grid import integrate, make_grid
from radchemo.model import InitialData, InvalidInitialData, ModelParams
from radchemo.operators import TridiagonalSystem, diffusion_bands
from radchemo.stationary import stationary_v

from conftest import observed_order

SCHEMES = ["fitted", "upwind"]


def bump(grid, amp=5.0, width=0.2):
    return 1.0 + amp * np.exp(-(grid.cell_centers / width) ** 2)


def test_no_cells_heat_relaxation():
    g = make_grid(2, 1.0, 32)
    p = ModelParams(2, 1.0, 1.0)
    v0 = 0.2 + 0.8 * g.cell_centers**2 / 1.0
    ctl = StepControl(dt_max=0.01, t_end=1.0, output_every=0.0)
    traj = run(g, InitialData(np.zeros(32), v0), p, ctl, validate=False, diagnostics=False)
    vs = np.array([s.v for s in traj.states])
    assert all(np.all(s.u == 0.0) for s in traj.states)
    assert np.all(np.diff(vs, axis=0) >= -1e-14)  # monotone increase toward v_star at every node
    assert np.max(np.abs(vs[-1] - 1.0)) < 1e-2


@pytest.mark.parametrize("taxis", SCHEMES)
def test_one_step_against_dense_solve(taxis):
    g = make_grid(3, 1.0, 32)
    p = ModelParams(3, 1.0, 1.0)
    dt = 0.002
    s = step(g, SimState(0.0, np.ones(32), np.ones(32)), p, StepControl(), dt=dt, taxis=taxis)
    np.testing.assert_allclose(s.u, 1.0, rtol=1e-13)
    sub, main, sup, extra = diffusion_bands(g, ("dirichlet", 1.0))
    vol = g.cell_volumes
    A = TridiagonalSystem(-sub, vol / dt - main + vol, -sup, None).dense()
    np.testing.assert_allclose(s.v, np.linalg.solve(A, vol / dt + extra), rtol=1e-12)
    # away from the boundary layer (width ~ sqrt(dt)) the implicit consumption dominates
    inner = g.cell_centers < 0.3
    np.testing.assert_allclose(s.v[inner], 1 / (1 + dt), atol=1e-6)
    assert s.t == dt


def test_discrete_stationary_pair_is_preserved():
    g = make_grid(2, 1.0, 64)
    p = ModelParams(2, 1.0, 1.0)
    res = stationary_v(g, 1.0, 1.0)
    traj = run(g, InitialData(res.u, res.v_alpha), p, StepControl(dt_max=0.05, t_end=2.0, output_every=1.0),
               boundary_tol=1e-3, diagnostics=False)
    fin = traj.final
    assert np.max(np.abs(fin.u - res.u)) < 1e-10
    assert np.max(np.abs(fin.v - res.v_alpha)) < 1e-10


def test_t_end_zero():
    g = make_grid(2, 1.0, 32)
    p = ModelParams(2, 1.0, 1.0)
    u0 = bump(g)
    traj = run(g, InitialData(u0, np.ones(32)), p, StepControl(t_end=0.0))
    assert len(traj.states) == 1 and traj.steps == 0
    np.testing.assert_array_equal(traj.final.u, u0)
    assert traj.records[0].t == 0.0


def test_invalid_initial_data_rejected():
    g = make_grid(2, 1.0, 32)
    with pytest.raises(InvalidInitialData):
        run(g, InitialData(np.zeros(32), np.ones(32)), ModelParams(2, 1.0, 1.0), StepControl())


@pytest.mark.parametrize("taxis", SCHEMES)
@pytest.mark.parametrize("n,eps", [(2, 0.0), (3, 0.1), (5, 0.0)])
def test_structure_preserved(taxis, n, eps):
    g = make_grid(n, 1.0, 48)
    p = ModelParams(n, 1.0, 1.0, eps)
    u0 = bump(g, 20.0, 0.15)
    traj = run(g, InitialData(u0, np.ones(48)), p, StepControl(dt_max=0.01, t_end=1.0, output_every=0.0),
               taxis=taxis, diagnostics=False)
    m0 = integrate(g, u0)
    for s in traj.states:
        assert abs(integrate(g, s.u) - m0) <= 1e-12 * m0
        assert s.u.min() >= 0 and s.v.min() > 0
        assert s.v.max() <= 1.0 + 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.floats(0.5, 30), st.floats(0.05, 0.5), st.floats(0.3, 1.0), st.integers(0, 2**31 - 1))
def test_single_step_properties(n, amp, width, vfloor, seed):
    g = make_grid(n, 1.0, 40)
    p = ModelParams(n, 1.0, 1.0)
    r = g.cell_centers
    u = amp * np.exp(-((r - np.random.default_rng(seed).uniform(0, 1)) / width) ** 2)
    v = vfloor + (1 - vfloor) * r**2
    s0 = SimState(0.0, u, v)
    ctl = StepControl(dt_max=0.05)
    for taxis in SCHEMES:
        s1 = step(g, s0, p, ctl, taxis=taxis)
        assert abs(integrate(g, s1.u) - integrate(g, u)) <= 1e-12 * integrate(g, u)
        assert s1.u.min() >= -1e-14 * u.max()
        assert 0 < s1.v.min() and s1.v.max() <= 1.0 + 1e-12


def test_dt_bounds():
    g = make_grid(2, 1.0, 64)
    p = ModelParams(2, 1.0, 1.0, 0.0)
    r = g.cell_centers
    s = SimState(0.0, 40 * np.exp(-r**2 / 0.01), 0.1 + 0.9 * r**2)
    ctl = StepControl(dt_max=1.0, cfl_safety=0.5)
    dt = choose_dt(g, s, p, ctl)
    vr = np.abs(np.diff(s.v)).max() / g.h
    assert dt <= 0.5 * g.h / vr + 1e-15
    assert dt <= 0.5 / s.u.max() + 1e-15
    assert choose_dt(g, s, p, ctl, "upwind") <= dt


def test_first_order_in_time():
    g = make_grid(2, 1.0, 64)
    p = ModelParams(2, 1.0, 1.0)
    init = InitialData(bump(g, 5.0, 0.3), np.ones(64))
    finals = []
    for dt in (4e-3, 2e-3, 1e-3):
        ctl = StepControl(dt_max=dt, cfl_safety=1.0, t_end=0.4, output_every=0.4)
        traj = run(g, init, p, ctl, diagnostics=False)
        assert max(traj.dts) <= dt * (1 + 1e-12)
        finals.append(traj.final.u)
    e1 = np.max(np.abs(finals[0] - finals[1]))
    e2 = np.max(np.abs(finals[1] - finals[2]))
    assert observed_order(e1, e2) >= 0.9


def test_output_cadence():
    g = make_grid(2, 1.0, 32)
    p = ModelParams(2, 1.0, 1.0)
    traj = run(g, InitialData(bump(g), np.ones(32)), p, StepControl(dt_max=0.03, t_end=1.0, output_every=0.25))
    np.testing.assert_allclose(traj.times, [0, 0.25, 0.5, 0.75, 1.0], atol=1e-14)
    assert [r.t for r in traj.records] == list(traj.times)


def test_invariant_violation_carries_time(monkeypatch):
    g = make_grid(2, 1.0, 32)
    p = ModelParams(2, 1.0, 1.0)
    r = g.cell_centers
    init = InitialData(np.exp(-(r / 0.1) ** 2) + 1e-3, 0.05 + 0.95 * r**2)
    monkeypatch.setattr(evolve, "choose_dt", lambda *a, **k: 50.0)
    with pytest.raises(InvariantViolation) as exc:
        run(g, init, p, StepControl(t_end=100.0, output_every=100.0), taxis="upwind", boundary_tol=1e-2)
    assert exc.value.t > 0


def test_step_control_validation():
    for kw in (dict(dt_max=0.0), dict(cfl_safety=0.0), dict(cfl_safety=1.5), dict(t_end=-1.0), dict(output_every=-1.0)):
        with pytest.raises(ValueError):
            StepControl(**kw)
    with pytest.raises(ValueError):
        step(make_grid(2, 1.0, 16), SimState(0.0, np.ones(16), np.ones(16)), ModelParams(2, 1.0, 1.0),
             StepControl(), taxis="central")
