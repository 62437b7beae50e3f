"""Radius profiles and metric data for surfaces of revolution.

The surface is the graph r = rho(x) over the standard cylinder, periodic in
both x (period L) and theta (period 2*pi).  The metric determinant is

    g = (1 + rho_x^2) * rho^2

and the divergence-form Laplace-Beltrami operator uses the coefficients

    a = rho^2 / sqrt(g)          (x-fluxes, evaluated at cell faces)
    b = (1 + rho_x^2) / sqrt(g)  (theta-fluxes, evaluated at nodes)

On a constant-radius cylinder rho == R these reduce to a = R, b = 1/R, so the
assembled operator is d^2/dx^2 + R^-2 d^2/dtheta^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveRadius, PeriodicityMismatch, ShapeMismatch

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L) x [0, 2*pi)."""

    n_x: int
    n_theta: int
    length: float

    def __post_init__(self):
        if self.n_x < 8 or self.n_theta < 8:
            raise ValueError("grid needs n_x >= 8 and n_theta >= 8")
        if self.length <= 0:
            raise ValueError("grid length must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n_x

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n_theta

    @property
    def x(self) -> np.ndarray:
        """Node coordinates x_i = i*dx."""
        return np.arange(self.n_x) * self.dx

    @property
    def x_faces(self) -> np.ndarray:
        """Face coordinates x_{i+1/2}; face i sits between nodes i and i+1."""
        return (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.n_theta) * self.dtheta


@dataclass(frozen=True)
class ProfileSpec:
    """Declarative description of a radius profile rho(x).

    kind
        "constant":      rho = base_radius
        "sinusoidal":    rho = base_radius * (1 + undulation_amplitude
                                              * sin(undulation_wavenumber * x))
        "gaussian_bump": rho = base_radius + bump_height
                               * exp(-(x - bump_center)^2 / (2 bump_width^2))
        "tabulated":     rho sampled at the grid nodes; derivative by
                         centered differences with periodic wrap.
    """

    kind: str
    base_radius: float = 1.0
    undulation_amplitude: float = 0.0
    undulation_wavenumber: float = 0.0
    bump_center: float = 0.0
    bump_width: float = 1.0
    bump_height: float = 0.0
    samples: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoidal", "gaussian_bump", "tabulated"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.base_radius <= 0 and self.kind != "tabulated":
            raise ValueError("base_radius must be positive")
        if self.undulation_amplitude < 0:
            raise ValueError("undulation_amplitude must be >= 0")


@dataclass(frozen=True)
class RadiusProfile:
    """rho(x) with derived metric arrays on a grid.

    a_face[i] is the coefficient rho^2/sqrt(g) at the face between nodes
    i and i+1 (periodic), b[i] is (1+rho_x^2)/sqrt(g) at node i.
    """

    grid: Grid
    rho: np.ndarray
    rho_x: np.ndarray
    g: np.ndarray
    sqrt_g: np.ndarray
    a_face: np.ndarray
    b: np.ndarray

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def length(self) -> float:
        return self.grid.length

    @property
    def area(self) -> float:
        """Discrete surface area, sum of sqrt(g) dx dtheta."""
        return float(np.sum(self.sqrt_g) * self.dx * TWO_PI)


def _evaluate(spec: ProfileSpec, x: np.ndarray):
    """Analytic rho and rho_x at arbitrary points."""
    if spec.kind == "constant":
        rho = np.full_like(x, spec.base_radius)
        rho_x = np.zeros_like(x)
    elif spec.kind == "sinusoidal":
        k = spec.undulation_wavenumber
        rho = spec.base_radius * (1.0 + spec.undulation_amplitude * np.sin(k * x))
        rho_x = spec.base_radius * spec.undulation_amplitude * k * np.cos(k * x)
    elif spec.kind == "gaussian_bump":
        z = (x - spec.bump_center) / spec.bump_width
        bump = spec.bump_height * np.exp(-0.5 * z * z)
        rho = spec.base_radius + bump
        rho_x = -bump * z / spec.bump_width
    else:
        raise ValueError(spec.kind)
    return rho, rho_x


def _tabulated_nodes(spec: ProfileSpec, grid: Grid):
    rho = np.asarray(spec.samples, dtype=float)
    if rho.shape != (grid.n_x,):
        raise ShapeMismatch(
            f"tabulated profile needs {grid.n_x} samples, got {rho.shape}"
        )
    rho_x = (np.roll(rho, -1) - np.roll(rho, 1)) / (2.0 * grid.dx)
    return rho, rho_x


def build_profile(spec: ProfileSpec, grid: Grid) -> RadiusProfile:
    """Evaluate a profile on a grid and assemble the metric coefficients.

    Raises NonPositiveRadius if rho <= 0 anywhere, PeriodicityMismatch if a
    sinusoidal profile does not close on [0, L].
    """
    if spec.kind == "sinusoidal":
        cycles = spec.undulation_wavenumber * grid.length / TWO_PI
        if abs(cycles - round(cycles)) > 1e-9 * max(1.0, abs(cycles)):
            raise PeriodicityMismatch(
                f"wavenumber {spec.undulation_wavenumber} gives {cycles} cycles "
                f"on [0, {grid.length}]"
            )

    if spec.kind == "tabulated":
        rho, rho_x = _tabulated_nodes(spec, grid)
        rho_f = 0.5 * (rho + np.roll(rho, -1))
        rho_x_f = 0.5 * (rho_x + np.roll(rho_x, -1))
    else:
        rho, rho_x = _evaluate(spec, grid.x)
        rho_f, rho_x_f = _evaluate(spec, grid.x_faces)

    if np.any(rho <= 0) or np.any(rho_f <= 0):
        raise NonPositiveRadius(f"profile {spec.kind} is non-positive on the grid")

    g = (1.0 + rho_x**2) * rho**2
    sqrt_g = np.sqrt(g)
    sqrt_g_f = rho_f * np.sqrt(1.0 + rho_x_f**2)
    a_face = rho_f**2 / sqrt_g_f
    b = (1.0 + rho_x**2) / sqrt_g

    return RadiusProfile(
        grid=grid, rho=rho, rho_x=rho_x, g=g, sqrt_g=sqrt_g, a_face=a_face, b=b
    )
