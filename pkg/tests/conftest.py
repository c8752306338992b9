import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(num: int, name: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {num} [{name}]: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE[num] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[num])
