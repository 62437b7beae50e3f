"""Lyapunov functionals, rate fitting and envelope verification.

The quadratic functionals are evaluated directly from the discrete gradient
form, which keeps them nonnegative by construction; the operator-based
expression -1/2 <u_perp, A u_perp> is exposed for cross-checking only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, ShapeMismatch, TimeGridMismatch
from .geometry import TWO_PI, RadiusProfile
from .operators import (
    State,
    apply_A,
    h1_seminorm_sq,
    inner_product,
    perp_state,
    scalar_norm_sq,
)

DEFAULT_FLOOR = 1e-10


def lyapunov_X0(u: State, profile: RadiusProfile) -> float:
    """Half the squared weighted norm of the non-radial part."""
    up = perp_state(u)
    return 0.5 * inner_product(up, up, profile)


def lyapunov_X1(u: State, profile: RadiusProfile) -> float:
    """1/2 (|grad u1_perp|^2 + alpha |u1_perp|^2 + gamma |u2_perp|^2)."""
    p = u.params
    up = perp_state(u)
    return 0.5 * (
        h1_seminorm_sq(up.u1, profile)
        + p.alpha * scalar_norm_sq(up.u1, profile)
        + p.gamma * scalar_norm_sq(up.u2, profile)
    )


def lyapunov_X1_operator(u: State, profile: RadiusProfile) -> float:
    """Cross-check path: -1/2 <u_perp, A u_perp>."""
    up = perp_state(u)
    return -0.5 * inner_product(up, apply_A(up, profile), profile)


def combined_X(x0: float, x1: float, c_prime: float, big_k: float) -> float:
    """Combined functional X1 + C' K^4 X0."""
    return x1 + c_prime * big_k**4 * x0


def default_c_prime(params) -> float:
    """Saturates C' >= 2 C2 / gamma with C2 = (11 - 5 eps gamma^2)/8."""
    c2 = 0.125 * (11.0 - 5.0 * params.eps * params.gamma**2)
    return 2.0 * c2 / params.gamma


def lyapunov_Y1(ubar: State, w: State, profile: RadiusProfile) -> float:
    """Diagonal quadratic form on v = ubar - w for the comparison estimate."""
    if ubar.u1.shape != w.u1.shape or ubar.u1.ndim != 1:
        raise ShapeMismatch("lyapunov_Y1 expects matching radial states")
    p = ubar.params
    v1 = ubar.u1 - w.u1
    v2 = ubar.u2 - w.u2
    return 0.5 * (
        h1_seminorm_sq(v1, profile)
        + p.alpha * scalar_norm_sq(v1, profile)
        + p.gamma * scalar_norm_sq(v2, profile)
    )


def remainder_W(u: State, profile: RadiusProfile) -> float:
    """Quartic-plus-octic remainder in the H1 norm of u1_perp."""
    up1 = perp_state(u).u1
    h1_sq = h1_seminorm_sq(up1, profile) + scalar_norm_sq(up1, profile)
    return h1_sq**2 + h1_sq**4


def perp_h10(u: State, profile: RadiusProfile) -> float:
    """H^{1,0} norm of the non-radial part."""
    up = perp_state(u)
    return np.sqrt(
        h1_seminorm_sq(up.u1, profile)
        + scalar_norm_sq(up.u2, profile) / u.params.eps
    )


def h10_norm(u: State, profile: RadiusProfile) -> float:
    return np.sqrt(
        h1_seminorm_sq(u.u1, profile) + scalar_norm_sq(u.u2, profile) / u.params.eps
    )


@dataclass
class RateFit:
    rate: float
    intercept: float
    window: tuple
    residual: float
    floor: float = DEFAULT_FLOOR
    n_points: int = 0


def fit_rate(times, values, floor: float = DEFAULT_FLOOR) -> RateFit:
    """Exponential decay rate from least squares on (t, log value).

    Samples at or below the floor are excluded; fewer than 5 surviving points
    raises InsufficientData.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = v > floor
    if mask.sum() < 5:
        raise InsufficientData(f"{int(mask.sum())} samples above floor {floor}")
    t, logv = t[mask], np.log(v[mask])
    slope, intercept = np.polyfit(t, logv, 1)
    resid = float(np.sqrt(np.mean((logv - (slope * t + intercept)) ** 2)))
    return RateFit(
        rate=-float(slope),
        intercept=float(intercept),
        window=(float(t[0]), float(t[-1])),
        residual=resid,
        floor=floor,
        n_points=int(mask.sum()),
    )


@dataclass
class EnvelopeReport:
    passed: bool
    first_violation: tuple | None = None  # (t, value, bound)
    detail: dict = field(default_factory=dict)


def check_decay_envelope(times, values, nu: float, margin: float = 0.0,
                         floor: float = 0.0) -> EnvelopeReport:
    """Verify value(t) <= (2 + margin) * value(0) * exp(-nu t) pointwise.

    Samples at or below the floor are ignored (dominated by solver noise).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    bound = (2.0 + margin) * v[0] * np.exp(-nu * (t - t[0]))
    bad = (v > bound) & (v > floor)
    if not bad.any():
        return EnvelopeReport(True, detail={"nu": nu, "margin": margin})
    i = int(np.argmax(bad))
    return EnvelopeReport(
        False,
        first_violation=(float(t[i]), float(v[i]), float(bound[i])),
        detail={"nu": nu, "margin": margin},
    )


def check_growth_envelope(times, y_values, w_values, growth_c: float,
                          horizon: float | None = None) -> EnvelopeReport:
    """Verify Y(t) <= (Y(0) + sup_{s<=t} W(s)) e^{C t} on its validity prefix.

    The bound is only claimed while the envelope itself stays <= 1; the
    report records the validity horizon actually used.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(y_values, dtype=float)
    w = np.asarray(w_values, dtype=float)
    env = (y[0] + np.maximum.accumulate(w)) * np.exp(growth_c * (t - t[0]))
    valid = env <= 1.0
    if horizon is not None:
        valid &= t - t[0] <= horizon
    if valid.any():
        t_valid = float(t[valid][-1])
    else:
        t_valid = float(t[0])
    bad = (y > env) & valid
    detail = {"growth_c": growth_c, "validity_horizon": t_valid}
    if not bad.any():
        return EnvelopeReport(True, detail=detail)
    i = int(np.argmax(bad))
    return EnvelopeReport(
        False, first_violation=(float(t[i]), float(y[i]), float(env[i])),
        detail=detail,
    )


def compare_average_to_effective(traj2d, traj1d, profile: RadiusProfile) -> dict:
    """Gap series |ubar(t) - w(t)|_{1,0} and Y1(t) between two trajectories.

    The 2D trajectory must have recorded its radial averages, the 1D one its
    states, at identical sample times.  The radial norm is scaled by 2*pi to
    match the surface measure of the averaged run.
    """
    if len(traj2d.times) != len(traj1d.times) or not np.allclose(
        traj2d.times, traj1d.times, rtol=0, atol=1e-12
    ):
        raise TimeGridMismatch("trajectories sampled at different times")
    if traj2d.mean_states is None or traj1d.mean_states is None:
        raise ValueError("both trajectories must record radial states")
    gaps = np.empty(len(traj2d.times))
    y1 = np.empty_like(gaps)
    for i, (ubar, w) in enumerate(zip(traj2d.mean_states, traj1d.mean_states)):
        v = State(ubar.u1 - w.u1, ubar.u2 - w.u2, ubar.params)
        gaps[i] = np.sqrt(TWO_PI) * h10_norm(v, profile)
        y1[i] = lyapunov_Y1(ubar, w, profile)
    return {"t": np.asarray(traj2d.times), "gap_h10": gaps, "Y1": y1}
