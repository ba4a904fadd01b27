import pytest

_LINES = {}


@pytest.fixture
def criterion_report():
    """Collects one summary line per acceptance criterion."""
    def record(result):
        _LINES[result.number] = result.line()
        print(result.line())
    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
