import numpy as np
import pytest

from invloc import data_path, parse_instance
from invloc.core import Instance, NormTag

EXAMPLE1 = np.array([
    [1.0, 0.0, 6.0, 1.4142135624, 5.0, 1.0, 6.0],
    [-5.0, 3.0, 3.0, 7.0, 3.0, 4.0, 2.0],
    [7.0, 2.0, 1.0, 1.0, 2.0, 4.0, 4.0],
    [0.0, -0.5, 2.0, 2.0, 1.0, 4.0, 1.0],
])


def example1(norm: NormTag = NormTag.SQUARED_EUCLIDEAN) -> Instance:
    return Instance.from_arrays(EXAMPLE1[:, :2], EXAMPLE1[:, 2], EXAMPLE1[:, 3:], norm)


def eighteen(norm: NormTag = NormTag.SQUARED_EUCLIDEAN) -> Instance:
    return parse_instance(data_path("eighteen.txt").read_text()).with_norm(norm)


def random_instance(rng: np.random.Generator, n: int, norm: NormTag = NormTag.SQUARED_EUCLIDEAN,
                    spread: float = 10.0) -> Instance:
    coords = rng.uniform(-spread, spread, size=(n, 2))
    weights = rng.uniform(1.0, 10.0, size=n)
    costs = rng.uniform(1.0, 10.0, size=(n, 4))
    return Instance.from_arrays(coords, weights, costs, norm)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
