import pytest

from abcde.datasets import make_four_agent, make_pair, make_quadratic_pair
from abcde.bench.generators import TopologyConfig, generate_problem


@pytest.fixture
def four():
    return make_four_agent()


@pytest.fixture
def product_pair():
    return make_pair(lambda x, y: x * y, name="xy")


@pytest.fixture
def concave_pair():
    # -(x-1)^2 - (y+2)^2 expanded
    return make_quadratic_pair((-1, 2, -1, -4, 0, -5))


@pytest.fixture
def er10():
    return generate_problem(TopologyConfig("er", n=10, p=0.4, seed=11))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
