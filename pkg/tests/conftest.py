import numpy as np
import pytest

from qhl.groups import QuotientContext


@pytest.fixture(scope="session")
def s2():
    return QuotientContext.build(1, 1, 2)


@pytest.fixture(scope="session")
def s2_sign():
    return QuotientContext.build(1, 1, 2, a=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_disc_point(rng, d, radius=0.7):
    return radius * np.sqrt(rng.uniform(size=d)) * np.exp(2j * np.pi * rng.uniform(size=d))


def random_torus_point(rng, d):
    return np.exp(2j * np.pi * rng.uniform(size=d))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
