import numpy as np
import pytest

from sqrtpool import Beta, Exponential, Gamma, LogNormal, Normal, Panel

TWO_NORMALS = (Normal(-1.0, 1.0), Normal(1.49, 1.49))


def random_density(rng, family):
    """A density with finite Fisher information, parameters in a moderate range."""
    if family == "normal":
        return Normal(rng.uniform(-2, 2), rng.uniform(0.5, 2.0))
    if family == "beta":
        return Beta(rng.uniform(3, 10), rng.uniform(3, 10))
    if family == "gamma":
        return Gamma(rng.uniform(5, 12), rng.uniform(0.5, 2.0))
    if family == "exponential":
        return Exponential(rng.uniform(0.3, 3.0))
    if family == "lognormal":
        return LogNormal(rng.uniform(-0.5, 1.0), rng.uniform(0.3, 0.9))
    raise ValueError(family)


def random_panel(rng, m, families=("normal",)):
    fams = rng.choice(families, size=m)
    return Panel(tuple(random_density(rng, f) for f in fams))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_normal_panel():
    return Panel(TWO_NORMALS, ("N(-1,1)", "N(1.49,1.49)"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
