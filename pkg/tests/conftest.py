import pytest

from wzwsle import build_sl
from wzwsle.weylmod import build_weyl


@pytest.fixture(scope="session")
def sl2():
    return build_sl(2)


@pytest.fixture(scope="session")
def sl3():
    return build_sl(3)


@pytest.fixture(scope="session")
def sl2_vac(sl2):
    return build_weyl(sl2, 1, (0,), 4)


@pytest.fixture(scope="session")
def sl2_spin(sl2):
    return build_weyl(sl2, 1, (1,), 4)


@pytest.fixture(scope="session")
def sl3_vac(sl3):
    return build_weyl(sl3, 1, (0, 0), 4)
