"""Collects the one-line verdicts printed by the acceptance suite and repeats them at the end of the run."""

import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record and print ``PASS``/``FAIL`` for a named criterion; returns ``ok`` for asserting."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
        _VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
