import numpy as np
import pytest
from hypothesis import settings

from wienerns.field import GridSpec, from_function
from wienerns.solutions import make_random_divfree, make_shear

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(16, 2 * np.pi, 7)


@pytest.fixture(scope="session")
def random_states():
    return [make_random_divfree(s) for s in range(3)]


@pytest.fixture(scope="session")
def shear():
    return make_shear()


def scalar(grid, fn):
    return from_function(grid, fn)


def vector(grid, f1, f2, f3, **kw):
    return from_function(grid, lambda x, y, z: np.stack(np.broadcast_arrays(
        f1(x, y, z), f2(x, y, z), f3(x, y, z))), **kw)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
