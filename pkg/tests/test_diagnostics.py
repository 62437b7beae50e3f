"""Lyapunov functionals, rate fitting and envelope checkers.

The functional values are checked against closed-form evaluations on a unit
cylinder where the azimuthal harmonic cos(theta) is an exact eigenfunction
of the discrete operator, and the envelope checkers are exercised with
independently integrated (RK4) solutions of their defining inequalities
turned into equalities.
"""

import numpy as np
import pytest

from undulant import FhnParams, Grid, ProfileSpec, State, build_profile, lift_radial
from undulant import diagnostics
from undulant.errors import InsufficientData, ShapeMismatch, TimeGridMismatch
from undulant.dynamics import Trajectory


def rk4(f, y0, t_grid):
    """Classic fixed-step RK4, independent of the package integrators."""
    y = np.empty(len(t_grid))
    y[0] = y0
    for i in range(len(t_grid) - 1):
        h = t_grid[i + 1] - t_grid[i]
        t, yi = t_grid[i], y[i]
        k1 = f(t, yi)
        k2 = f(t + 0.5 * h, yi + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, yi + 0.5 * h * k2)
        k4 = f(t + h, yi + h * k3)
        y[i + 1] = yi + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


@pytest.fixture
def unit_cylinder():
    grid = Grid(n_x=8, n_theta=16, length=1.0)
    return build_profile(ProfileSpec("constant", base_radius=1.0), grid)


@pytest.fixture
def harmonic_state(unit_cylinder, params):
    """u1 = cos(theta), u2 = 0 on the unit cylinder of length 1."""
    grid = unit_cylinder.grid
    u1 = np.broadcast_to(np.cos(grid.theta), (grid.n_x, grid.n_theta)).copy()
    return State(u1, np.zeros_like(u1), params)


def azimuthal_eigenvalue(n_theta):
    dth = 2.0 * np.pi / n_theta
    return (2.0 - 2.0 * np.cos(dth)) / dth**2


def test_x0_closed_form(harmonic_state, unit_cylinder):
    # X0 = 1/2 ||cos theta||^2 = 1/2 * pi * L * R = pi/2
    assert diagnostics.lyapunov_X0(harmonic_state, unit_cylinder) == pytest.approx(
        np.pi / 2.0, rel=1e-13
    )


def test_x1_closed_form(harmonic_state, unit_cylinder, params):
    lam = azimuthal_eigenvalue(16)
    expected = 0.5 * np.pi * (lam + params.alpha)
    assert diagnostics.lyapunov_X1(harmonic_state, unit_cylinder) == pytest.approx(
        expected, rel=1e-13
    )


def test_x1_operator_path_agrees(undulated_small, params, rng):
    shape = (undulated_small.grid.n_x, undulated_small.grid.n_theta)
    u = State(rng.standard_normal(shape), rng.standard_normal(shape), params)
    direct = diagnostics.lyapunov_X1(u, undulated_small)
    via_op = diagnostics.lyapunov_X1_operator(u, undulated_small)
    assert direct == pytest.approx(via_op, rel=1e-11)


def test_remainder_and_perp_norm_closed_form(harmonic_state, unit_cylinder):
    lam = azimuthal_eigenvalue(16)
    h1_sq = np.pi * (lam + 1.0)
    assert diagnostics.remainder_W(harmonic_state, unit_cylinder) == pytest.approx(
        h1_sq**2 + h1_sq**4, rel=1e-12
    )
    assert diagnostics.perp_h10(harmonic_state, unit_cylinder) == pytest.approx(
        np.sqrt(np.pi * lam), rel=1e-13
    )


def test_combined_and_c_prime():
    params = FhnParams(0.25, 0.01, 0.01)
    # C' = 2 C2 / gamma with C2 = (11 - 5 eps gamma^2)/8
    assert diagnostics.default_c_prime(params) == pytest.approx(
        274.99987499999997, rel=1e-15
    )
    assert diagnostics.combined_X(2.0, 3.0, 10.0, 0.5) == pytest.approx(
        3.0 + 10.0 * 0.5**4 * 2.0
    )


def test_y1_radial_form(unit_cylinder, params):
    grid = unit_cylinder.grid
    k = 2.0 * np.pi / grid.length
    v1 = np.cos(k * grid.x)
    ubar = State(v1, np.zeros_like(v1), params)
    w = State(np.zeros_like(v1), np.zeros_like(v1), params)
    lam_x = (2.0 - 2.0 * np.cos(k * grid.dx)) / grid.dx**2
    # ||cos kx||^2 = L/2 without the theta factor
    expected = 0.5 * (lam_x + params.alpha) * grid.length / 2.0
    assert diagnostics.lyapunov_Y1(ubar, w, unit_cylinder) == pytest.approx(
        expected, rel=1e-13
    )
    surf = State(np.zeros((8, 16)), np.zeros((8, 16)), params)
    with pytest.raises(ShapeMismatch):
        diagnostics.lyapunov_Y1(surf, surf, unit_cylinder)


def test_fit_rate_recovers_exponential():
    t = np.linspace(0.0, 10.0, 101)
    fit = diagnostics.fit_rate(t, 3.0 * np.exp(-0.7 * t))
    assert fit.rate == pytest.approx(0.7, rel=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-10)
    assert fit.residual < 1e-12
    assert fit.n_points == 101


def test_fit_rate_floor_and_insufficient_data():
    t = np.linspace(0.0, 10.0, 101)
    v = np.exp(-5.0 * t)  # hits the 1e-10 floor near t = 4.6
    fit = diagnostics.fit_rate(t, v)
    assert fit.n_points < 101
    assert fit.rate == pytest.approx(5.0, rel=1e-10)
    with pytest.raises(InsufficientData):
        diagnostics.fit_rate(t, np.full_like(t, 1e-12))


def test_decay_envelope_passes_on_equality_ode():
    # X' = -X + 0.1 X^2 decays slightly slower than e^{-t} but stays far
    # below the factor-2 envelope on [0, 10]
    t = np.linspace(0.0, 10.0, 201)
    x = rk4(lambda s, y: -y + 0.1 * y * y, 0.5, t)
    report = diagnostics.check_decay_envelope(t, x, nu=1.0)
    assert report.passed and report.first_violation is None


def test_decay_envelope_fails_at_predicted_sample():
    # checking e^{-t} against a 10% stronger rate must first fail at the
    # first sample past t* = ln 2 / 0.1 = 6.931
    t = np.linspace(0.0, 10.0, 101)
    x = np.exp(-t)
    report = diagnostics.check_decay_envelope(t, x, nu=1.1)
    assert not report.passed
    assert report.first_violation[0] == pytest.approx(7.0)
    t_bad, v_bad, bound = report.first_violation
    assert v_bad > bound


def test_decay_envelope_ignores_floor_noise():
    t = np.linspace(0.0, 10.0, 101)
    x = np.exp(-t)
    x[-1] = 1e-13  # solver noise way below the envelope's floor
    report = diagnostics.check_decay_envelope(t, x, nu=1.1, floor=1e-3)
    assert report.passed


def test_growth_envelope_passes_on_equality_ode():
    # Y' = C (Y + w0) solves to (Y0 + w0) e^{Ct} - w0 <= (Y0 + sup W) e^{Ct}
    t = np.linspace(0.0, 4.0, 201)
    c, y0, w0 = 0.5, 0.01, 0.005
    y = rk4(lambda s, v: c * (v + w0), y0, t)
    report = diagnostics.check_growth_envelope(t, y, np.full_like(t, w0), c)
    assert report.passed
    assert report.detail["validity_horizon"] == pytest.approx(4.0)


def test_growth_envelope_fails_at_predicted_sample():
    # inflating the exact solution by 10% first exceeds the envelope at the
    # first sample past t* = ln(1.1 w0 / (0.1 (y0 + w0))) / C = 2 ln(11/3)
    t = np.linspace(0.0, 6.0, 61)
    c, y0, w0 = 0.5, 0.01, 0.005
    exact = (y0 + w0) * np.exp(c * t) - w0
    inflated = 1.1 * exact
    inflated[0] = exact[0]  # keep the recorded initial value
    report = diagnostics.check_growth_envelope(
        t, inflated, np.full_like(t, w0), c
    )
    assert not report.passed
    t_star = 2.0 * np.log(1.1 * w0 / (0.1 * (y0 + w0)))
    expected_sample = t[np.searchsorted(t, t_star)]
    assert report.first_violation[0] == pytest.approx(expected_sample)


def test_growth_envelope_validity_horizon():
    # once the envelope exceeds 1 the bound is no longer claimed
    t = np.linspace(0.0, 20.0, 201)
    c, y0, w0 = 0.5, 0.01, 0.005
    y = (y0 + w0) * np.exp(c * t) - w0
    report = diagnostics.check_growth_envelope(t, 10.0 * y, np.full_like(t, w0), c)
    assert report.detail["validity_horizon"] < 20.0
    report2 = diagnostics.check_growth_envelope(
        t, y, np.full_like(t, w0), c, horizon=5.0
    )
    assert report2.passed
    assert report2.detail["validity_horizon"] <= 5.0


def _radial_traj(times, states):
    return Trajectory(times=np.asarray(times), columns={}, mean_states=states)


def test_compare_average_to_effective(unit_cylinder, params):
    grid = unit_cylinder.grid
    t = np.array([0.0, 1.0])
    k = 2.0 * np.pi / grid.length
    v1 = np.cos(k * grid.x)
    zero = np.zeros_like(v1)
    ubar = State(v1, zero, params)
    w = State(zero.copy(), zero.copy(), params)
    out = diagnostics.compare_average_to_effective(
        _radial_traj(t, [ubar, ubar]), _radial_traj(t, [w, w]), unit_cylinder
    )
    lam_x = (2.0 - 2.0 * np.cos(k * grid.dx)) / grid.dx**2
    expected_gap = np.sqrt(2.0 * np.pi * lam_x * grid.length / 2.0)
    assert np.allclose(out["gap_h10"], expected_gap)
    assert np.allclose(out["Y1"], 0.5 * (lam_x + params.alpha) * grid.length / 2.0)

    with pytest.raises(TimeGridMismatch):
        diagnostics.compare_average_to_effective(
            _radial_traj([0.0, 1.0], [ubar, ubar]),
            _radial_traj([0.0, 2.0], [w, w]),
            unit_cylinder,
        )
    with pytest.raises(ValueError):
        diagnostics.compare_average_to_effective(
            _radial_traj(t, None), _radial_traj(t, [w, w]), unit_cylinder
        )
