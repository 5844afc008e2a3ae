import numpy as np
import pytest

from arithfwd.curve import FlatCurve, PillarCurve
from arithfwd.g2pp import G2ppParams
from arithfwd.timegrid import build_grid

TABLE1_PARAMS = [
    (0.07, 0.51, 0.04, 0.86, -0.27),
    (0.03, 0.46, 0.05, 0.67, -0.32),
    (0.01, 0.1, 0.08, 0.44, 0.5),
    (0.03, 0.58, 0.02, 0.41, 0.19),
    (0.02, 0.31, 0.05, 0.17, -0.61),
]
TABLE2_PARAMS = [
    (0.02, 0.62, 0.09, 0.56, -0.57),
    (0.07, 0.1, 0.04, 0.5, 0.7),
    (0.04, 0.47, 0.09, 0.97, 0.17),
    (0.04, 0.98, 0.09, 0.98, 0.02),
    (0.08, 0.04, 0.08, 0.41, -0.79),
]


@pytest.fixture
def flat5():
    return FlatCurve(0.05)


@pytest.fixture
def pillar_curve():
    return PillarCurve([0.0, 0.25, 1.0, 2.0, 5.0], [1.0, 0.99, 0.955, 0.91, 0.78])


@pytest.fixture
def t1_model():
    return G2ppParams(*TABLE1_PARAMS[0])


@pytest.fixture
def t2_model():
    return G2ppParams(*TABLE2_PARAMS[1])


@pytest.fixture
def grid_3m():
    return build_grid(30, 120)


@pytest.fixture
def grid_6m():
    return build_grid(360, 540)


def random_params(rng: np.random.Generator, one_factor: bool = False) -> G2ppParams:
    """Draw parameters in the ranges spanned by the two tables."""
    sigma = rng.uniform(0.01, 0.08)
    a = rng.uniform(0.04, 1.0)
    eta = 0.0 if one_factor else rng.uniform(0.02, 0.09)
    b = rng.uniform(0.17, 1.0)
    rho = 0.0 if one_factor else rng.uniform(-0.8, 0.7)
    return G2ppParams(sigma, a, eta, b, rho)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
