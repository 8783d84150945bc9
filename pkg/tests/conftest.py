"""Suite-level wiring.

The acceptance module records one verdict per criterion here; after the
normal pytest output a dedicated section prints one line per criterion
so the gate can be read at a glance.
"""

import pytest

_ACCEPTANCE_RESULTS = {}


def _record(number: int, label: str, passed: bool, detail: str) -> None:
    _ACCEPTANCE_RESULTS[number] = (label, bool(passed), detail)


@pytest.fixture
def acceptance_log():
    """Recorder the acceptance tests report their verdicts through."""
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        label, passed, detail = _ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number} {verdict} [{label}]: {detail}")
