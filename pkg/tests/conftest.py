import pytest

from invariant_set.models import AmbientConfig
from invariant_set.root_family import PowerCache, build_family


@pytest.fixture(scope="session")
def config2():
    return AmbientConfig(n_tot=2)


@pytest.fixture(scope="session")
def config3():
    return AmbientConfig(n_tot=3)


@pytest.fixture(scope="session")
def config4():
    return AmbientConfig(n_tot=4)


@pytest.fixture(scope="session")
def family2(config2):
    return build_family(config2)


@pytest.fixture(scope="session")
def family3(config3):
    return build_family(config3)


@pytest.fixture(scope="session")
def family4(config4):
    return build_family(config4)


@pytest.fixture(scope="session")
def powers3(family3):
    return PowerCache(family3)
