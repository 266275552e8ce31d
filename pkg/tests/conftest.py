import numpy as np
import pytest

from octolat.kernel import build_kernel_table
from octolat.lattice import DIM, LatticeDomain

# criterion lines collected by test_acceptance and echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table5():
    return build_kernel_table(5)


@pytest.fixture(scope="session")
def table7():
    return build_kernel_table(7)


@pytest.fixture(scope="session")
def box3():
    return LatticeDomain.box(np.zeros(DIM, dtype=np.int64), 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
