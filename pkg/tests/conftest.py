import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one ``AC-n PASS|FAIL detail`` line; echoed in the terminal summary."""

    def report(criterion: str, ok: bool, detail: str) -> bool:
        line = f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[0].split("-")[1])):
            terminalreporter.write_line(line)
