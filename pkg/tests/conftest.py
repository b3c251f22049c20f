import pytest

_criteria: list[tuple[int, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance criterion's outcome for the end-of-run summary."""

    def _record(number: int, passed: bool, detail: str) -> None:
        _criteria.append((number, passed, detail))
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_criteria):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
