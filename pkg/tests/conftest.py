import pytest

from prickliness.terrain import Terrain1D, Terrain2D
from prickliness.generators import gen_grid


def pyramid(height=3):
    V = [(0, 0, 0), (4, 0, 0), (4, 4, 0), (0, 4, 0), (2, 2, height)]
    F = [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]
    return Terrain2D(V, F)


def two_pyramids():
    heights = [[0, 0, 0, 0, 0],
               [0, 3, 0, 3, 0],
               [0, 0, 0, 0, 0]]
    return gen_grid(heights)


@pytest.fixture
def pyr():
    return pyramid()


@pytest.fixture
def peak1d():
    return Terrain1D([(0, 0), (1, 1), (2, 0)])
