import numpy as np
import pytest

from actionlab.flat_geometry import FlatTorus
from actionlab.hamiltonians import quadratic_capped
from actionlab.presets import circle_orbits, circle_pair, square_torus


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


@pytest.fixture
def circle():
    return FlatTorus((1.0,))


@pytest.fixture
def rectangle():
    return FlatTorus((1.0, 1.3))


@pytest.fixture
def mu3():
    return quadratic_capped(3.0, 2.2, 0.1)


@pytest.fixture
def orbits_preset():
    return circle_orbits()


@pytest.fixture
def pair_preset():
    return circle_pair()


@pytest.fixture
def square_preset():
    return square_torus()


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
