import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# Criterion verdicts collected by test_acceptance.py, printed once at the end.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    print(line, file=sys.__stdout__, flush=True)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {c}: {detail}")


@pytest.fixture
def acceptance():
    return record
