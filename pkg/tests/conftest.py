import numpy as np
import pytest

from pumrbf import Domain, NodeSpec, eval_test_function, make_nodes

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid65():
    return make_nodes(NodeSpec("grid", 6))


@pytest.fixture(scope="session")
def franke65(grid65):
    return grid65, eval_test_function("franke", grid65)


@pytest.fixture(scope="session")
def f1_65(grid65):
    return grid65, eval_test_function("f1", grid65)


@pytest.fixture(scope="session")
def unit():
    return Domain()
