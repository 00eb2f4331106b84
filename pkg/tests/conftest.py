import math

import pytest

from adamslab import bubble_green as bg
from adamslab import extremal_lab as ex
from adamslab import ground_state as gs

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ground4():
    return gs.maximize_quotient(4)


@pytest.fixture(scope="session")
def ground2():
    return gs.maximize_quotient(2)


@pytest.fixture(scope="session")
def fsol():
    return bg.fundamental_solution()


@pytest.fixture(scope="session")
def test_functions(fsol):
    return {eps: ex.build_test_function(eps, None, fsol) for eps in (1e-2, 1e-3)}


@pytest.fixture(scope="session")
def sweep4(ground4):
    return ex.threshold_sweep(ex.sweep_alphas(4, ground4.quotient), 4)


@pytest.fixture(scope="session")
def sweep2(ground2):
    return ex.threshold_sweep(ex.sweep_alphas(2, ground2.quotient), 2)


@pytest.fixture(scope="session")
def critical_M():
    return ex.critical_sup_estimate()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


PI = math.pi
