import numpy as np
import pytest

from meshvf import shapes
from meshvf.pdtree import PDTree


@pytest.fixture(scope="session")
def cube():
    """20 mm cube centered at the origin: 12 triangles, 8 vertices."""
    return shapes.cube(20.0)


@pytest.fixture(scope="session")
def unit_cube():
    return shapes.cube(1.0)


@pytest.fixture(scope="session")
def icosphere():
    return shapes.icosphere(10.0, 2)


@pytest.fixture(scope="session")
def torus():
    return shapes.torus(12.0, 4.0, 32, 16)


@pytest.fixture(scope="session")
def cube_tree(cube):
    return PDTree(cube)


@pytest.fixture(scope="session")
def sphere_tree(icosphere):
    return PDTree(icosphere)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
