import pytest

CRITERION_LINES = []


@pytest.fixture
def criterion_lines():
    return CRITERION_LINES


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
