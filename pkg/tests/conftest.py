"""Shared fixtures: small grids and profiles reused across the suite."""

import numpy as np
import pytest

from undulant import FhnParams, Grid, ProfileSpec, build_profile

CANONICAL_WAVENUMBER = 2.0 * np.pi / 40.0


@pytest.fixture
def grid_small():
    return Grid(n_x=32, n_theta=16, length=40.0)


@pytest.fixture
def cylinder_small(grid_small):
    return build_profile(ProfileSpec("constant", base_radius=1.0), grid_small)


@pytest.fixture
def undulated_small(grid_small):
    spec = ProfileSpec(
        "sinusoidal",
        base_radius=0.2,
        undulation_amplitude=0.25,
        undulation_wavenumber=CANONICAL_WAVENUMBER,
    )
    return build_profile(spec, grid_small)


@pytest.fixture
def params():
    return FhnParams(alpha=0.25, eps=0.01, gamma=0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
