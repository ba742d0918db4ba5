import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radchemo.diagnostics import (
    DiagnosticsRecord,
    check_record,
    dissipation_balance,
    energy_bound_check,
    energy_identity_residual,
    lemma21_check,
    record,
    spacetime_bounds,
)
from radchemo.evolve import SimState, StepControl, run
from radchemo.grid import make_grid
from radchemo.model import InitialData, ModelParams
from radchemo.oracle import fine_quadrature
from radchemo.stationary import stationary_v
from radchemo.verify import random_log_profile

from conftest import observed_order


def const_record(n=2, M=32, u=1.0, vs=1.0, t=0.0):
    g = make_grid(n, 1.0, M)
    return g, record(g, SimState(t, np.full(M, u), np.full(M, vs)), ModelParams(n, 1.0, vs))


@pytest.mark.parametrize("closure", ["scheme", "smooth"])
def test_constants_give_zero_terms(closure):
    g = make_grid(3, 1.0, 32)
    rec = record(g, SimState(0.0, np.ones(32), np.ones(32)), ModelParams(3, 1.0, 1.0), closure=closure)
    for name in ("entropy", "energy_y", "fisher", "hesslog", "cross", "grad4", "v_grad_l2", "bdry1", "bdry2", "bdry3"):
        assert abs(getattr(rec, name)) <= 1e-12, name
    assert rec.mass == pytest.approx(g.volume, rel=1e-12)
    assert rec.u_boundary == pytest.approx(1.0)


def test_entropy_of_e():
    g, rec = const_record(u=math.e)
    assert rec.entropy == pytest.approx(math.pi * math.e, rel=1e-12)


def test_entropy_convention_at_zero():
    g, rec = const_record(u=0.0)
    assert rec.entropy == 0.0
    assert rec.fisher is None


def test_zero_boundary_value_drops_terms():
    g = make_grid(2, 1.0, 32)
    v = 0.5 * g.cell_centers**2 + 0.1
    rec = record(g, SimState(0.0, np.ones(32), v), ModelParams(2, 1.0, 0.0))
    assert rec.bdry1 is None and rec.bdry3 is None


def test_columns_and_dict():
    _, rec = const_record()
    assert DiagnosticsRecord.columns()[0] == "t"
    assert list(rec.as_dict()) == DiagnosticsRecord.columns()


def test_unknown_closure():
    g = make_grid(2, 1.0, 16)
    with pytest.raises(ValueError):
        record(g, SimState(0.0, np.ones(16), np.ones(16)), ModelParams(2, 1.0, 1.0), closure="exact")


# manufactured fields: u = 1 + cos(pi r)/2, v = exp(a (r^2 - 1)) with v(1) = 1
A_COEF = 0.3
N_DIM = 3


def _u(r):
    return 1 + 0.5 * np.cos(np.pi * r)


def _ur(r):
    return -0.5 * np.pi * np.sin(np.pi * r)


def _v(r):
    return np.exp(A_COEF * (r**2 - 1))


def _vr(r):
    return 2 * A_COEF * r * _v(r)


def _reference():
    n, q = N_DIM, lambda f: fine_quadrature(f, N_DIM, 1.0)
    area = 4 * math.pi
    d1 = 2 * A_COEF
    d2 = 2 * A_COEF + d1**2
    ref = {
        "entropy": q(lambda r: _u(r) * np.log(_u(r))),
        "v_grad_l2": q(lambda r: _vr(r) ** 2),
        "fisher": q(lambda r: _ur(r) ** 2 / _u(r)),
        "hesslog": q(lambda r: _v(r) * 4 * A_COEF**2 * n),
        "cross": q(lambda r: 0.5 * _u(r) / _v(r) * _vr(r) ** 2),
        "grad4": q(lambda r: _vr(r) ** 4),
        "int_u_power": q(lambda r: _u(r) ** ((n + 2) / n)),
        "int_grad_u_power": q(lambda r: np.abs(_ur(r)) ** ((n + 2) / (n + 1))),
        "bdry1": area * 2 * d1 * d2,
        "bdry2": area * d1**2 * 2 * d1 * d2,
        "bdry3": area * d1**3,
        "u_boundary": 0.5,
    }
    ref["energy_y"] = ref["entropy"] + 0.5 * q(lambda r: _vr(r) ** 2 / _v(r))
    return ref


def test_manufactured_fields_second_order():
    ref = _reference()
    errs = {k: [] for k in ref}
    for M in (64, 128):
        g = make_grid(N_DIM, 1.0, M)
        r = g.cell_centers
        rec = record(g, SimState(0.0, _u(r), _v(r)), ModelParams(N_DIM, 1.0, 1.0), closure="smooth")
        for k in ref:
            errs[k].append(abs(getattr(rec, k) - ref[k]))
    for k, (e1, e2) in errs.items():
        assert e2 <= 1e-2 * max(1.0, abs(ref[k])), k
        assert observed_order(e1, e2) >= 1.9, (k, e1, e2)


def steady_records(M, alpha=1.0, n=2):
    g = make_grid(n, 1.0, M)
    p = ModelParams(n, 1.0, 1.0)
    res = stationary_v(g, alpha, 1.0)
    return [record(g, SimState(t, res.u, res.v_alpha), p) for t in (0.0, 1.0)]


def test_steady_state_residual_vanishes_with_h():
    res = [np.max(np.abs(energy_identity_residual(steady_records(M)))) for M in (64, 128)]
    assert res[1] <= 2.0 / 128
    assert res[1] < res[0]


def test_residual_constants_zero():
    g = make_grid(2, 1.0, 16)
    p = ModelParams(2, 1.0, 1.0)
    recs = [record(g, SimState(t, np.ones(16), np.ones(16)), p) for t in (0.0, 0.5)]
    np.testing.assert_allclose(energy_identity_residual(recs), 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        energy_identity_residual(recs[:1])


def test_residual_bypass_refinement():
    # u ~ 0: the identity only involves v; refine h, dt and the output spacing together
    out = []
    for M, dt, every in ((32, 4e-3, 0.02), (64, 1e-3, 0.01), (128, 2.5e-4, 0.005)):
        g = make_grid(2, 1.0, M)
        p = ModelParams(2, 1.0, 1.0)
        v0 = 1 - 0.5 * np.cos(np.pi * g.cell_centers / 2) ** 2
        traj = run(g, InitialData(np.full(M, 1e-300), v0), p,
                   StepControl(dt_max=dt, t_end=0.3, output_every=every), validate=False)
        recs = [r for r in traj.records if r.t >= 0.1 - 1e-12]
        for r in recs:
            r.fisher = 0.0  # u_r vanishes identically; the positivity floor only hides it
        out.append(np.max(np.abs(energy_identity_residual(recs))))
    assert out[2] < 3e-3
    assert observed_order(out[0], out[1]) >= 1.5 and observed_order(out[1], out[2]) >= 1.5


def test_check_record_flags():
    g, rec = const_record()
    assert check_record(rec, rec.mass, 1.0, g.volume) == []
    msgs = check_record(rec, 2 * rec.mass, 0.5, g.volume)
    assert any("mass" in m for m in msgs) and any("v_max" in m for m in msgs)


def test_dissipation_balance_requires_terms():
    _, rec = const_record(u=0.0)
    with pytest.raises(ValueError):
        dissipation_balance(rec)


def test_lemma21_constant():
    g = make_grid(3, 1.0, 32)
    res = lemma21_check(g, np.full(32, 2.0), 2.0)
    assert res.lhs == pytest.approx(0.0, abs=1e-12) and res.rhs == pytest.approx(0.0, abs=1e-10)
    assert res.satisfied


@pytest.mark.parametrize("n", [2, 3])
def test_lemma21_gaussian_log(n):
    # phi = exp(r^2/2): lhs = int r^4 e^{r^2/2}, rhs = (2+sqrt n)^2 n int e^{r^2/2} + 2|S| R^3 e^{R^2/2}
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    lhs = fine_quadrature(lambda r: r**4 * np.exp(r**2 / 2), n, 1.0)
    rhs = (2 + math.sqrt(n)) ** 2 * n * fine_quadrature(lambda r: np.exp(r**2 / 2), n, 1.0) + 2 * area * math.exp(0.5)
    g = make_grid(n, 1.0, 256)
    res = lemma21_check(g, np.exp(g.cell_centers**2 / 2), math.exp(0.5))
    assert res.lhs == pytest.approx(lhs, rel=1e-4)
    assert res.rhs == pytest.approx(rhs, rel=1e-4)
    assert res.satisfied and res.lhs < res.rhs


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**31 - 1))
def test_lemma21_random_profiles(n, seed):
    g = make_grid(n, 1.0, 256)
    phi = random_log_profile(np.random.default_rng(seed), 1.0)
    res = lemma21_check(g, g.sample(phi), float(phi(1.0)))
    assert res.satisfied, (res.lhs, res.rhs, res.tol)


def test_lemma21_rejects_nonpositive():
    g = make_grid(2, 1.0, 16)
    with pytest.raises(ValueError):
        lemma21_check(g, np.zeros(16))


def test_spacetime_constant_trajectory():
    recs = steady_records(64)
    recs = [recs[0], DiagnosticsRecord(**{**recs[1].as_dict(), "t": 2.0})]
    b = spacetime_bounds(recs, window=1.0)
    assert len(b["window_start"]) == 2
    for key in ("int_u_power", "int_grad_u_power", "grad4"):
        np.testing.assert_allclose(b[key], getattr(recs[0], key), rtol=1e-12)


def test_spacetime_no_cells():
    g = make_grid(2, 1.0, 16)
    p = ModelParams(2, 1.0, 1.0)
    recs = [record(g, SimState(t, np.zeros(16), np.ones(16)), p) for t in (0.0, 1.0)]
    b = spacetime_bounds(recs)
    assert b["int_u_power"][0] == 0.0 and b["int_grad_u_power"][0] == 0.0
    with pytest.raises(ValueError):
        spacetime_bounds(recs, window=2.0)


def test_energy_bound_on_run():
    g = make_grid(2, 1.0, 64)
    p = ModelParams(2, 1.0, 1.0)
    u0 = 1 + 5 * np.exp(-(g.cell_centers / 0.2) ** 2)
    traj = run(g, InitialData(u0, np.ones(64)), p, StepControl(dt_max=0.01, t_end=3.0, output_every=0.1))
    ok, margin = energy_bound_check(traj.records)
    assert ok and margin >= 0
