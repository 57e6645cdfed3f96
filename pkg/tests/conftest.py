import pytest

_REPORT = []


@pytest.fixture
def report():
    """Record one acceptance line: report(number, passed, text)."""
    def add(number, passed, text):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
        _REPORT.append((number, line))
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_REPORT, key=lambda r: r[0]):
        terminalreporter.write_line(line)
