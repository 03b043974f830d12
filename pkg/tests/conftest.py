"""Collects the one-line verdicts printed by the acceptance suite."""
import pytest

VERDICTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[k])


@pytest.fixture
def verdict():
    """``verdict(k, ok, detail)`` records and prints the line for criterion ``k``."""
    def record(k, ok, detail):
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        VERDICTS[k] = line
        print(line)
        return ok
    return record
