"""Pulse ignition, speed measurement and the fast-pulse reference speed."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoCrossing, WrapDetected
from .geometry import Grid
from .operators import FhnParams, State

FIT_WINDOW = (0.3, 0.9)   # fraction of the trajectory used for the speed fit
SEAM_MARGIN = 0.1         # fraction of L treated as "near the periodic seam"


@dataclass
class PulseMeasurement:
    level: float
    times: np.ndarray
    positions: np.ndarray
    speed: float
    residual: float
    window: tuple


def step_initial_data(grid: Grid, x_front: float, params: FhnParams,
                      amplitude: float = 1.0) -> State:
    """Smoothed indicator of x < x_front (tanh ramp of width 4 dx), u2 = 0.

    Ignites the stable fast pulse when the amplitude exceeds the threshold.
    """
    if not 0.0 < x_front < grid.length:
        raise DomainError(f"x_front must lie in (0, {grid.length})")
    ramp = 0.5 * (1.0 - np.tanh((grid.x - x_front) / (4.0 * grid.dx)))
    return State(amplitude * ramp, np.zeros(grid.n_x), params)


def theoretical_fast_speed(alpha: float) -> float:
    """Leading-order fast pulse speed (sqrt(2)/2) (1 - 2 alpha)."""
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2), got {alpha}")
    return 0.5 * math.sqrt(2.0) * (1.0 - 2.0 * alpha)


def measure_speed(traj, level: float = 0.5) -> PulseMeasurement:
    """Least-squares front speed from the recorded crossing series.

    Fits position vs time over [0.3 T, 0.9 T]; samples without a crossing
    (NaN) are dropped.  Raises NoCrossing if the window is empty and
    WrapDetected if the front gets within 10% of the periodic seam.
    """
    if "pulse_x" not in traj.columns:
        raise NoCrossing("trajectory did not record a crossing series")
    t = np.asarray(traj.times, dtype=float)
    x = np.asarray(traj.columns["pulse_x"], dtype=float)
    t_final = t[-1]
    window = (FIT_WINDOW[0] * t_final, FIT_WINDOW[1] * t_final)
    in_window = (t >= window[0]) & (t <= window[1]) & np.isfinite(x)
    if not in_window.any():
        raise NoCrossing(f"no level-{level} crossing inside {window}")

    length = traj.meta.get("length")
    if length is not None:
        xs = x[in_window]
        if xs.max() > (1.0 - SEAM_MARGIN) * length or xs.min() < SEAM_MARGIN * length:
            raise WrapDetected(
                f"front within {SEAM_MARGIN:.0%} of the seam during the fit window"
            )

    tw, xw = t[in_window], x[in_window]
    speed, intercept = np.polyfit(tw, xw, 1)
    resid = float(np.sqrt(np.mean((xw - (speed * tw + intercept)) ** 2)))
    return PulseMeasurement(
        level=level,
        times=tw,
        positions=xw,
        speed=float(speed),
        residual=resid,
        window=window,
    )
