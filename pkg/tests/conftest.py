import pytest

from qmc.gf import build_tower

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def F4():
    return build_tower(2, 2)


@pytest.fixture(scope="session")
def F13():
    return build_tower(13)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict, echoed in the terminal summary."""
    def _report(number, passed, detail=""):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
