import numpy as np
import pytest

from dissectree.offspring import (GeometricTail, build_constrained,
                                  build_custom, build_p_angulation,
                                  build_uniform_dissection)


@pytest.fixture(scope="session")
def tri():
    return build_p_angulation(3)


@pytest.fixture(scope="session")
def quad():
    return build_p_angulation(4)


@pytest.fixture(scope="session")
def penta():
    return build_p_angulation(5)


@pytest.fixture(scope="session")
def uniform():
    return build_uniform_dissection()


@pytest.fixture(scope="session")
def even_faces():
    """All face degrees even: offspring support {0} plus odd integers >= 3."""
    return build_constrained({"offset": 4, "step": 2, "unbounded": True})


@pytest.fixture(scope="session")
def odd_faces():
    """All face degrees odd: offspring support {0} plus even integers >= 2."""
    return build_constrained({"offset": 3, "step": 2, "unbounded": True})


@pytest.fixture(scope="session")
def geometric():
    """mu_k = 2^{-(k+1)}: critical with unary vertices allowed."""
    return build_custom({}, GeometricTail(start=0, step=1, first=0.5,
                                          ratio=0.5))


@pytest.fixture(scope="session")
def custom_finite():
    """A small hand-built critical law: {0: 5/9, 2: 1/3, 3: 1/9}."""
    return build_custom({0: 5.0 / 9.0, 2: 1.0 / 3.0, 3: 1.0 / 9.0})


@pytest.fixture(scope="session")
def example_laws(tri, quad, penta, uniform, even_faces, odd_faces):
    return {"tri": tri, "quad": quad, "penta": penta, "uniform": uniform,
            "even": even_faces, "odd": odd_faces}


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(1234))
