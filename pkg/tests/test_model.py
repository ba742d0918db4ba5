import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radchemo.grid import make_grid
from radchemo.model import (
    InitialData,
    InvalidInitialData,
    ModelParams,
    boundary_extrapolate,
    f_eps,
    f_eps_prime,
    validate_initial,
)

xis = st.floats(0.0, 1e6)
epss = st.floats(0.0, 0.999999)


def test_f_eps_examples():
    assert f_eps(0.0, 0.5) == 0.0
    assert f_eps(3.0, 0.0) == 3.0
    assert f_eps(1.0, 1 - 1e-9) == pytest.approx(0.5, rel=1e-8)


def test_f_eps_prime_examples():
    assert f_eps_prime(123.0, 0.0) == 1.0
    assert f_eps_prime(1.0, 1.0) == 0.25


@pytest.mark.parametrize("xi, eps", [(0.5, 0.3), (2.0, 0.9), (10.0, 0.01)])
def test_f_eps_prime_matches_central_difference(xi, eps):
    errs = []
    for h in (1e-2, 5e-3):
        fd = (f_eps(xi + h, eps) - f_eps(xi - h, eps)) / (2 * h)
        errs.append(abs(fd - f_eps_prime(xi, eps)))
    assert errs[1] < errs[0] / 3.5  # O(h^2)


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        f_eps(-1.0, 0.1)
    with pytest.raises(ValueError):
        f_eps_prime(np.array([1.0, -1e-3]), 0.1)


def test_vectorized():
    xi = np.linspace(0, 5, 6)
    np.testing.assert_allclose(f_eps(xi, 0.5), xi / (1 + 0.5 * xi))


@given(xis, xis, epss)
def test_f_eps_monotone(a, b, eps):
    lo, hi = min(a, b), max(a, b)
    assert f_eps(lo, eps) <= f_eps(hi, eps)


@given(xis, epss)
def test_f_eps_bounds(xi, eps):
    F = f_eps(xi, eps)
    assert 0 <= F <= xi
    if eps > 0:
        assert F <= 1 / eps * (1 + 1e-15)
    d = f_eps_prime(xi, eps)
    assert 0 < d <= 1 or (d == 0 and xi * eps > 1e150)


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_f_eps_converges_to_identity(eps):
    xi = np.linspace(0, 10, 1001)
    # xi - F = eps xi^2 / (1 + eps xi) <= 100 eps on [0, 10]
    assert np.max(np.abs(f_eps(xi, eps) - xi)) <= 100 * eps


@pytest.mark.parametrize("kw", [dict(eps=1.5), dict(eps=1.0), dict(eps=-0.1), dict(v_star=-1.0), dict(n=1), dict(R=0.0)])
def test_model_params_rejects(kw):
    base = dict(n=2, R=1.0, v_star=1.0, eps=0.0)
    base.update(kw)
    with pytest.raises(ValueError):
        ModelParams(**base)


def test_model_params_accepts_zero_v_star():
    assert ModelParams(2, 1.0, 0.0).v_star == 0.0


@pytest.fixture
def setup():
    g = make_grid(2, 1.0, 32)
    return g, ModelParams(2, 1.0, 1.0)


def test_valid_constant_data(setup):
    g, p = setup
    data = validate_initial(InitialData(np.ones(32), np.ones(32)), p, g)
    np.testing.assert_array_equal(data.u0, 1.0)


def test_zero_cell_density_rejected(setup):
    g, p = setup
    with pytest.raises(InvalidInitialData) as exc:
        validate_initial(InitialData(np.zeros(32), np.ones(32)), p, g)
    assert exc.value.violations == ["u0 must not vanish identically"]


def test_nonpositive_signal_rejected(setup):
    g, p = setup
    v0 = np.ones(32)
    v0[3] = 0.0
    with pytest.raises(InvalidInitialData, match="v0 must be positive"):
        validate_initial(InitialData(np.ones(32), v0), p, g)


def test_every_violation_reported(setup):
    g, p = setup
    u0 = -np.ones(32)
    v0 = np.full(32, 2.0)
    with pytest.raises(InvalidInitialData) as exc:
        validate_initial(InitialData(u0, v0), p, g)
    msgs = exc.value.violations
    assert "u0 must be nonnegative" in msgs
    assert "u0 must not vanish identically" in msgs
    assert any("v_star" in m for m in msgs)


def test_boundary_compatibility_uses_extrapolation(setup):
    g, p = setup
    r = g.cell_centers
    v0 = 1.0 + 0.1 * (1 - r**2)  # quadratic: extrapolation is exact
    assert boundary_extrapolate(g, v0) == pytest.approx(1.0, abs=1e-13)
    validate_initial(InitialData(np.ones(32), v0), p, g)
    with pytest.raises(InvalidInitialData):
        validate_initial(InitialData(np.ones(32), v0 + 1e-6), p, g)


def test_grid_mismatch(setup):
    g, p = setup
    with pytest.raises(ValueError):
        validate_initial(InitialData(np.ones(31), np.ones(31)), p, g)
    with pytest.raises(ValueError):
        validate_initial(InitialData(np.ones(32), np.ones(32)), ModelParams(3, 1.0, 1.0), g)
