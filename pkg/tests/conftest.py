import math

import numpy as np
import pytest

from fraxion.field import GridSpec, SpaceTimeTestFunction, gaussian


@pytest.fixture(scope="session")
def grid1d():
    return GridSpec(1, 256, 12.0)


@pytest.fixture(scope="session")
def grid2d():
    return GridSpec(2, 128, 12.0)


@pytest.fixture(scope="session")
def gauss1d(grid1d):
    return gaussian(math.pi).sample(grid1d)


@pytest.fixture(scope="session")
def gauss2d(grid2d):
    return gaussian(math.pi).sample(grid2d)


@pytest.fixture(scope="session")
def st_grid():
    return GridSpec(1, 128, 12.0, time_points=256, time_half_width=16.0)


@pytest.fixture(scope="session")
def st_gauss(st_grid):
    return SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(st_grid)


def interior_mask_1d(grid, radius=6.0):
    return np.abs(grid.axis()) <= radius
