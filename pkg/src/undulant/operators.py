"""Discrete surface operators, weighted inner products and projections.

Surface fields are (n_x, n_theta) arrays, radial fields are (n_x,) arrays.
All operators are assembled in divergence form with the face coefficient
a = rho^2/sqrt(g) and node coefficient b = (1+rho_x^2)/sqrt(g), which makes
the Laplacian exactly self-adjoint and negative semi-definite with respect
to the sqrt(g)-weighted inner product.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParamMismatch, ShapeMismatch
from .geometry import RadiusProfile


@dataclass(frozen=True)
class FhnParams:
    """FitzHugh-Nagumo parameters: threshold alpha, timescale eps, coupling gamma."""

    alpha: float
    eps: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if self.eps <= 0 or self.gamma <= 0:
            raise ValueError("eps and gamma must be positive")
        if self.eps >= 1.0 or self.gamma >= 1.0:
            warnings.warn(
                f"eps={self.eps}, gamma={self.gamma}: the model assumes both << 1",
                stacklevel=2,
            )


@dataclass
class State:
    """A pair (u1, u2) of same-kind fields with parameters attached."""

    u1: np.ndarray
    u2: np.ndarray
    params: FhnParams

    def __post_init__(self):
        self.u1 = np.asarray(self.u1, dtype=float)
        self.u2 = np.asarray(self.u2, dtype=float)
        if self.u1.shape != self.u2.shape:
            raise ShapeMismatch(f"u1 {self.u1.shape} vs u2 {self.u2.shape}")
        if self.u1.ndim not in (1, 2):
            raise ShapeMismatch(f"fields must be 1D or 2D, got {self.u1.ndim}D")

    @property
    def kind(self) -> str:
        return "surface" if self.u1.ndim == 2 else "radial"

    def copy(self) -> "State":
        return State(self.u1.copy(), self.u2.copy(), self.params)


def _check_surface(f: np.ndarray, profile: RadiusProfile):
    if f.shape != (profile.grid.n_x, profile.grid.n_theta):
        raise ShapeMismatch(
            f"expected {(profile.grid.n_x, profile.grid.n_theta)}, got {f.shape}"
        )


def _check_radial(f: np.ndarray, profile: RadiusProfile):
    if f.shape != (profile.grid.n_x,):
        raise ShapeMismatch(f"expected {(profile.grid.n_x,)}, got {f.shape}")


def laplace_beltrami(f: np.ndarray, profile: RadiusProfile) -> np.ndarray:
    """Surface Laplacian (1/sqrt(g)) [d_x a d_x + d_theta b d_theta] f."""
    _check_surface(f, profile)
    dx2 = profile.dx**2
    dth2 = profile.grid.dtheta**2
    a = profile.a_face[:, None]
    a_prev = np.roll(profile.a_face, 1)[:, None]
    flux_x = a * (np.roll(f, -1, axis=0) - f) - a_prev * (f - np.roll(f, 1, axis=0))
    flux_t = profile.b[:, None] * (
        np.roll(f, -1, axis=1) - 2.0 * f + np.roll(f, 1, axis=1)
    )
    return (flux_x / dx2 + flux_t / dth2) / profile.sqrt_g[:, None]


def radial_laplacian(f: np.ndarray, profile: RadiusProfile) -> np.ndarray:
    """The x-part of the surface Laplacian, acting on radial fields."""
    _check_radial(f, profile)
    dx2 = profile.dx**2
    a = profile.a_face
    a_prev = np.roll(a, 1)
    flux = a * (np.roll(f, -1) - f) - a_prev * (f - np.roll(f, 1))
    return flux / (dx2 * profile.sqrt_g)


def apply_laplacian(f: np.ndarray, profile: RadiusProfile) -> np.ndarray:
    """Dispatch on field kind."""
    return laplace_beltrami(f, profile) if f.ndim == 2 else radial_laplacian(f, profile)


def scalar_inner(f: np.ndarray, g: np.ndarray, profile: RadiusProfile) -> float:
    """L2(d mu) inner product.  Radial fields carry no 2*pi theta factor."""
    if f.shape != g.shape:
        raise ShapeMismatch(f"{f.shape} vs {g.shape}")
    if f.ndim == 2:
        _check_surface(f, profile)
        w = np.sum(f * g, axis=1) * profile.grid.dtheta
    else:
        _check_radial(f, profile)
        w = f * g
    return float(np.sum(w * profile.sqrt_g) * profile.dx)


def scalar_norm_sq(f: np.ndarray, profile: RadiusProfile) -> float:
    return scalar_inner(f, f, profile)


def inner_product(u: State, v: State, profile: RadiusProfile) -> float:
    """Weighted inner product <u, v> = int (u1 v1 + eps^-1 u2 v2) d mu."""
    if u.params.eps != v.params.eps:
        raise ParamMismatch(f"eps {u.params.eps} vs {v.params.eps}")
    return scalar_inner(u.u1, v.u1, profile) + scalar_inner(
        u.u2, v.u2, profile
    ) / u.params.eps


def norm_sq(u: State, profile: RadiusProfile) -> float:
    return inner_product(u, u, profile)


def h1_seminorm_sq(f: np.ndarray, profile: RadiusProfile) -> float:
    """|grad f|^2 integrated against d mu, in flux (gradient) form.

    Equals <f, -Lap f> to machine precision by discrete summation by parts.
    """
    dx = profile.dx
    if f.ndim == 2:
        _check_surface(f, profile)
        dth = profile.grid.dtheta
        gx = (np.roll(f, -1, axis=0) - f) / dx
        gt = (np.roll(f, -1, axis=1) - f) / dth
        sx = np.sum(profile.a_face[:, None] * gx * gx) * dx * dth
        st = np.sum(profile.b[:, None] * gt * gt) * dx * dth
        return float(sx + st)
    _check_radial(f, profile)
    gx = (np.roll(f, -1) - f) / dx
    return float(np.sum(profile.a_face * gx * gx) * dx)


def h10_norm_sq(u: State, profile: RadiusProfile) -> float:
    """Squared H^{1,0} norm: <u1, -Lap u1> + eps^-1 ||u2||^2."""
    lap = apply_laplacian(u.u1, profile)
    return -scalar_inner(u.u1, lap, profile) + scalar_norm_sq(
        u.u2, profile
    ) / u.params.eps


def h10_norm_sq_gradient(u: State, profile: RadiusProfile) -> float:
    """Same quantity through the gradient form; agrees to machine precision."""
    return h1_seminorm_sq(u.u1, profile) + scalar_norm_sq(u.u2, profile) / u.params.eps


def project_radial(f: np.ndarray) -> np.ndarray:
    """Zero azimuthal harmonic: the mean over theta."""
    if f.ndim == 1:
        return f.copy()
    return f.mean(axis=1)


def lift_radial(f: np.ndarray, n_theta: int) -> np.ndarray:
    """Extend a radial field to the surface grid, constant in theta."""
    return np.repeat(f[:, None], n_theta, axis=1)


def perp(f: np.ndarray) -> np.ndarray:
    """Non-radial remainder f - mean_theta(f)."""
    if f.ndim == 1:
        return np.zeros_like(f)
    return f - f.mean(axis=1, keepdims=True)


def perp_state(u: State) -> State:
    return State(perp(u.u1), perp(u.u2), u.params)


def mean_state(u: State) -> State:
    return State(project_radial(u.u1), project_radial(u.u2), u.params)


def apply_A(u: State, profile: RadiusProfile) -> State:
    """Linearization at the rest state: (Lap u1 - alpha u1 - u2, eps(u1 - gamma u2))."""
    p = u.params
    lap = apply_laplacian(u.u1, profile)
    return State(
        lap - p.alpha * u.u1 - u.u2,
        p.eps * (u.u1 - p.gamma * u.u2),
        p,
    )


def fhn_f(v: np.ndarray, alpha: float) -> np.ndarray:
    """Cubic reaction term -v (v - alpha) (v - 1)."""
    return -v * (v - alpha) * (v - 1.0)


def fhn_h(v: np.ndarray, alpha: float) -> np.ndarray:
    """Nonlinear remainder h(v) = -v^3 + (alpha+1) v^2, so f(v) = h(v) - alpha v."""
    return v * v * (alpha + 1.0 - v)


def nonlinearity(u: State) -> State:
    """The nonlinear part N(u) = (h(u1), 0) of the dynamics."""
    return State(fhn_h(u.u1, u.params.alpha), np.zeros_like(u.u2), u.params)
