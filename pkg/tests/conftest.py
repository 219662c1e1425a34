import pytest

from qkneser.geometry import projective_space
from qkneser.kneser import build_graph

_GRAPHS = {}

# (criterion, ok, detail) rows collected by the acceptance suite
ACCEPTANCE_LINES = []


def graph(omega, q):
    key = (tuple(omega), q)
    if key not in _GRAPHS:
        _GRAPHS[key] = build_graph(5, omega, q)
    return _GRAPHS[key]


@pytest.fixture(scope="session")
def pg2():
    return projective_space(5, 2)


@pytest.fixture(scope="session")
def pg3():
    return projective_space(5, 3)


@pytest.fixture(scope="session")
def g23_2():
    return graph((2, 3), 2)


@pytest.fixture(scope="session")
def g24_2():
    return graph((2, 4), 2)


@pytest.fixture(scope="session")
def g23_3():
    return graph((2, 3), 3)


@pytest.fixture(scope="session")
def g24_3():
    return graph((2, 4), 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit}: {detail}")
