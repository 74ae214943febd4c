import pytest
from strategies import ACCEPTANCE_LINES

from eptl.lawkit import load_fixture_trace


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def concurrent_trace():
    return load_fixture_trace("concurrent_trace.json")


@pytest.fixture
def stale_trace():
    return load_fixture_trace("stale_trace.json")


@pytest.fixture
def ax_or_graph():
    return load_fixture_trace("law_ax_or.json")


@pytest.fixture
def u_or_graph():
    return load_fixture_trace("law_u_or.json")


@pytest.fixture
def u_induction_graph():
    return load_fixture_trace("law_u_induction.json")
