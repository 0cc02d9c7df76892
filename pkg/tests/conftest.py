import numpy as np
import pytest

from conftwistor.cli.scenes import load_scene
from conftwistor.fields import Field, conformal_frame
from conftwistor.samples import sample_points


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def points():
    return [tuple(p) for p in sample_points(5, seed=7)]


@pytest.fixture(scope="session")
def bumpy():
    return load_scene("bumpy")


@pytest.fixture(scope="session")
def bumpy_e(bumpy):
    return bumpy.e


def conformal(expr):
    """Vierbein z * 1 for a scalar field given as a callable of the coordinates."""
    return conformal_frame(Field(expr, "z"))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
