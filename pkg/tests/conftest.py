"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from skewmf import build_grid, desingularize


@pytest.fixture(scope="session")
def torus16():
    return build_grid("torus", 16)


@pytest.fixture(scope="session")
def torus32():
    return build_grid("torus", 32)


@pytest.fixture(scope="session")
def sphere48():
    return build_grid("sphere", 48)


@pytest.fixture(scope="session")
def pd_plain_t32(torus32):
    """Torus 32, h = 1 + 0.5 cos(2 pi x), rho = (4 pi, 5 pi): region 0."""
    x = torus32.node_points()[..., 0]
    h = 1.0 + 0.5 * np.cos(2.0 * np.pi * x)
    return desingularize(torus32, (4.0 * np.pi, 5.0 * np.pi), h, h)
