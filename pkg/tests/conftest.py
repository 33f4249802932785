import pytest

from horseshoe.tables import load_reference_tables


@pytest.fixture(scope="session")
def tables():
    return load_reference_tables()


ACCEPTANCE_LINES: list = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def add(criterion: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
