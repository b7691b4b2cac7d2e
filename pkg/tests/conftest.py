import numpy as np
import pytest

from lcu import Graph

RESULTS = []


def record(number, passed, detail):
    """Register one acceptance verdict; all of them are printed at the end of the session."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(RESULTS, key=lambda r: str(r[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def path3():
    """Path 0-1-2 with labels (1, 0, 2)."""
    return Graph.from_edges(3, [(0, 1), (1, 2)], labels=[1, 0, 2], num_classes=2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
