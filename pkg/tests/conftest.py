import numpy as np
import pytest

from halfspace.grid import Torus, identity_coefficients


@pytest.fixture
def torus32():
    return Torus(1, 2.0 * np.pi, 32)


@pytest.fixture
def torus64():
    return Torus(1, 2.0 * np.pi, 64)


@pytest.fixture
def identity32(torus32):
    return identity_coefficients(torus32)
