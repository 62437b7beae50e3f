"""FitzHugh-Nagumo dynamics on undulated cylindrical surfaces.

Simulates the two-component excitable system with the surface
Laplace-Beltrami operator of a radius profile rho(x), the effective 1D
radial system, and the Lyapunov-functional diagnostics that verify the
symmetrization and effective-system estimates numerically.
"""

from .geometry import Grid, ProfileSpec, RadiusProfile, build_profile
from .operators import (
    FhnParams,
    State,
    apply_A,
    fhn_f,
    fhn_h,
    h10_norm_sq,
    inner_product,
    laplace_beltrami,
    lift_radial,
    nonlinearity,
    perp,
    project_radial,
    radial_laplacian,
)
from .dynamics import (
    ProbeSet,
    Stepper,
    StepperConfig,
    Trajectory,
    default_dt,
    simulate,
    simulate_radial,
    step,
)
from .pulse import (
    PulseMeasurement,
    measure_speed,
    step_initial_data,
    theoretical_fast_speed,
)
from . import diagnostics, errors, harness, snapshot

__all__ = [
    "Grid", "ProfileSpec", "RadiusProfile", "build_profile",
    "FhnParams", "State", "apply_A", "fhn_f", "fhn_h", "h10_norm_sq",
    "inner_product", "laplace_beltrami", "lift_radial", "nonlinearity",
    "perp", "project_radial", "radial_laplacian",
    "ProbeSet", "Stepper", "StepperConfig", "Trajectory", "default_dt",
    "simulate", "simulate_radial", "step",
    "PulseMeasurement", "measure_speed", "step_initial_data",
    "theoretical_fast_speed",
    "diagnostics", "errors", "harness", "snapshot",
]

__version__ = "0.1.0"
