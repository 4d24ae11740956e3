import numpy as np
import pytest

from fskde import AngleWeightSet, estimate, make_kernel

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_set(rng, n=None):
    n = int(rng.integers(1, 40)) if n is None else n
    return AngleWeightSet(rng.uniform(-np.pi, np.pi, n), rng.uniform(0.0, 2.0, n))


def random_descriptor(rng, order=8, n=None):
    return estimate(random_set(rng, n), make_kernel(order))
