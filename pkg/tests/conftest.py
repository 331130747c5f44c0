import gc

import pytest

from regstruct.algebra import Hopf, generate_structure, gpam_spec, phi4_spec


@pytest.fixture(scope="session", autouse=True)
def _no_cyclic_gc():
    # The interned symbol tables hold millions of immutable long-lived objects;
    # generational collection rescans them constantly for zero benefit.
    gc.disable()
    yield
    gc.enable()


@pytest.fixture(scope="session")
def gpam_structure():
    return generate_structure(gpam_spec())


@pytest.fixture(scope="session")
def gpam_hopf(gpam_structure):
    return Hopf(gpam_structure.spec)


@pytest.fixture(scope="session")
def phi4_structure():
    return generate_structure(phi4_spec())


@pytest.fixture(scope="session")
def phi4_hopf(phi4_structure):
    return Hopf(phi4_structure.spec)
