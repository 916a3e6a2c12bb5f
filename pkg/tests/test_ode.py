import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import backward_slope
from seacoop.model import DomainError, QualitySchedule, base_config, validate_config
from seacoop.ode import (
    CoefficientPath,
    PreconditionError,
    integrate_state,
    solve_coefficients_batch,
    solve_coefficients_I,
    solve_coefficients_II,
)


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.9, 0.99])
def test_terminal_values_exact(base_I, base_II, theta):
    one = solve_coefficients_I(base_I, theta)
    two = solve_coefficients_II(base_II, theta)
    for path in (one, two):
        for name in path.names:
            assert getattr(path, name)[-1] == 0.0
        assert path.feasible


def test_terminal_slopes(base_I, base_II):
    dt = base_I.grid.dt
    one = solve_coefficients_I(base_I, 0.0)
    assert backward_slope(one.beta1, dt) == pytest.approx(-200.0, rel=1e-6)
    assert backward_slope(one.betaM, dt) == pytest.approx(-200.0, rel=1e-6)
    two = solve_coefficients_II(base_II, 0.0)
    assert backward_slope(two.beta2, dt) == pytest.approx(200.0, rel=1e-6)
    assert two.beta2[-2] < 0


def test_golden_coefficients(base_I, base_II, golden):
    one = solve_coefficients_I(base_I, 0.0)
    assert one.beta1[0] == pytest.approx(golden["B1_0"], rel=1e-6)
    assert one.betaM[0] == pytest.approx(golden["BM_0"], rel=1e-6)
    assert one.alpha1[0] == pytest.approx(golden["A1_0"], rel=1e-6)
    two = solve_coefficients_II(base_II, 0.0)
    assert two.beta2[0] == pytest.approx(golden["B2_0"], rel=1e-6)


@pytest.mark.parametrize("theta", [0.0, 0.5])
def test_unforced_system_stays_zero(theta):
    cfg = base_config("I", c1=0.0, cM=0.0)
    path = solve_coefficients_I(cfg, theta)
    for name in path.names:
        assert np.all(getattr(path, name) == 0.0)


@settings(max_examples=15, deadline=None)
@given(
    theta=st.floats(0, 0.95),
    q1=st.floats(0, 0.3),
    qM=st.floats(0, 0.3),
    c1=st.floats(1, 300),
    cM=st.floats(1, 300),
)
def test_scenario_two_reduces_to_one(theta, q1, qM, c1, cM):
    kw = dict(q1=q1, qM=qM, c1=c1, cM=cM, grid_steps=200)
    one = solve_coefficients_I(base_config("I", **kw), theta)
    two = solve_coefficients_II(base_config("II", q2=0.0, **kw), theta)
    for name in ("beta1", "betaM", "alpha1", "alphaM"):
        np.testing.assert_allclose(getattr(two, name), getattr(one, name), atol=1e-8, rtol=0)


def test_sign_structure_at_base(base_I, base_II):
    one = solve_coefficients_I(base_I, 0.3)
    assert np.all(one.beta1 >= 0) and np.all(one.betaM >= 0)
    two = solve_coefficients_II(base_II, 0.3)
    assert np.all(two.beta2 <= 0)


def test_theta_domain(base_I):
    for bad in (-0.01, 0.995, 1.0):
        with pytest.raises(DomainError):
            solve_coefficients_I(base_I, bad)


def test_blowup_flags_infeasible_without_raising():
    # margins this large push beta past the 1e12 guard
    cfg = base_config("I", c1=1e14, rho1=0.0)
    batch = solve_coefficients_batch(cfg, [0.0, 0.5])
    assert not batch.feasible.any()
    ok = solve_coefficients_batch(base_config("I"), [0.0, 0.5])
    assert ok.feasible.all()


def test_batch_matches_single(base_II):
    thetas = [0.0, 0.25, 0.6]
    batch = solve_coefficients_batch(base_II, thetas)
    for i, th in enumerate(thetas):
        single = solve_coefficients_II(base_II, th)
        np.testing.assert_array_equal(batch.path(i).beta2, single.beta2)


def test_static_share_without_advertising():
    cfg = base_config("I", rho1=0.0, rhoM=0.0, x0=0.37)
    path = solve_coefficients_I(cfg, 0.2)
    x = integrate_state(cfg, 0.2, path).x
    assert np.all(x == 0.37)


def test_state_closed_form():
    # dx/dt = (1 - x) with x(0) = 0
    cfg = validate_config({"T": 1.0, "grid_steps": 100, "rho1": 1.0, "rhoM": 0.0, "q1": 1.0, "x0": 0.0})
    n = cfg.grid_steps + 1
    path = CoefficientPath(
        theta=0.0, scenario="I", config=cfg,
        alpha1=np.zeros(n), beta1=np.full(n, 2.0), alphaM=np.zeros(n), betaM=np.zeros(n),
    )
    x = integrate_state(cfg, 0.0, path).x
    assert x[-1] == pytest.approx(1 - np.exp(-1.0), abs=1e-6)
    assert x[-1] == pytest.approx(0.632121, abs=1e-6)
    np.testing.assert_allclose(x, 1 - np.exp(-cfg.grid.nodes), atol=1e-9)


def test_state_preconditions(base_I):
    path = solve_coefficients_I(base_I, 0.2)
    with pytest.raises(PreconditionError):
        integrate_state(base_I, 0.3, path)
    path.feasible = False
    with pytest.raises(PreconditionError):
        integrate_state(base_I, 0.2, path)


def test_golden_state(base_I, golden):
    path = solve_coefficients_I(base_I, 0.0)
    x = integrate_state(base_I, 0.0, path).x
    assert x[0] == 0.1
    assert x[-1] == pytest.approx(golden["XT_0"], rel=1e-6)
    assert np.all((0 <= x) & (x <= 1))
    assert np.all(np.diff(x) >= 0)


def test_fourth_order_convergence(golden):
    # errors at dt = 2, 1, 1/2 against the extrapolated fine-grid oracle
    errs = {"B1_0": [], "BM_0": [], "XT_0": []}
    for N in (50, 100, 200):
        cfg = base_config("I", grid_steps=N)
        path = solve_coefficients_I(cfg, 0.0)
        x = integrate_state(cfg, 0.0, path).x
        errs["B1_0"].append(abs(path.beta1[0] - golden["B1_0"]))
        errs["BM_0"].append(abs(path.betaM[0] - golden["BM_0"]))
        errs["XT_0"].append(abs(x[-1] - golden["XT_0"]))
    for key, e in errs.items():
        ratios = [e[0] / e[1], e[1] / e[2]]
        assert all(11 < r < 22 for r in ratios), (key, ratios)


def test_time_varying_quality_feasible():
    cfg = base_config("II", qM=QualitySchedule.linear(0.05, 0.25), q2=QualitySchedule.linear(0.25, 0.05))
    path = solve_coefficients_II(cfg, 0.4)
    x = integrate_state(cfg, 0.4, path).x
    assert path.feasible
    assert np.all((0 <= x) & (x <= 1))
