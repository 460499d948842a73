import math

import pytest

from jclab.dynamics import SystemParams


@pytest.fixture
def unit_params():
    """g = k = 1 with the atom in the equal superposition, phi = 0."""
    return SystemParams(g=1.0, k=1.0, theta=math.pi / 2, phi=0.0)
