import time

import pytest

from ree_unital.finite_fields import make_field
from ree_unital.rt_unital import build_rt


@pytest.fixture(scope="session")
def gf3():
    return make_field(1)


@pytest.fixture(scope="session")
def gf27():
    return make_field(3)


@pytest.fixture(scope="session")
def rt3(gf3):
    return build_rt(gf3)


@pytest.fixture(scope="session")
def rt27_timed(gf27):
    """RT(27) with its build time in seconds."""
    t0 = time.perf_counter()
    u = build_rt(gf27)
    return u, time.perf_counter() - t0
