import numpy as np
import pytest

from decgauge import builders, mesh


@pytest.fixture(scope="session")
def tri1():
    cx = mesh.SimplicialComplex(
        3, [(0, 1, 2)], coordinates=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    )
    return mesh.RegionMesh(cx, name="tri1")


@pytest.fixture(scope="session")
def disk6():
    return builders.disk(6)


@pytest.fixture(scope="session")
def disk8():
    return builders.disk(8)


@pytest.fixture(scope="session")
def disk16():
    return builders.disk(16)


@pytest.fixture(scope="session")
def ann8():
    return builders.square_annulus()


@pytest.fixture(scope="session")
def annulus16():
    return builders.annulus(16)


@pytest.fixture(scope="session")
def square2():
    return builders.square(2)


@pytest.fixture(scope="session")
def strip4():
    return builders.strip(4)


@pytest.fixture(scope="session")
def tet():
    return builders.tetrahedron()


@pytest.fixture(scope="session")
def torus_region():
    return mesh.region_from_hypersurface(
        builders.solid_torus(8).boundary, name="torus_surface"
    )


@pytest.fixture(scope="session")
def solid_torus8():
    return builders.solid_torus(8)


@pytest.fixture(scope="session")
def two_annuli():
    return mesh.disjoint_union(builders.annulus(8), builders.square_annulus())


@pytest.fixture(scope="session")
def circle12():
    return builders.circle(12)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
