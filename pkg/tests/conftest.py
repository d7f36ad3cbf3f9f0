import pytest

_REPORT: dict[int, str] = {}


@pytest.fixture(scope="session")
def report():
    """Record one summary line per acceptance criterion."""

    def add(number: int, passed: bool, text: str) -> None:
        _REPORT[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {text}"
        print(_REPORT[number])

    return add


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_REPORT):
        terminalreporter.write_line(_REPORT[k])


@pytest.fixture(scope="session")
def acceptance_config():
    from pathlib import Path

    return Path(__file__).resolve().parents[1] / "configs" / "acceptance.ini"
