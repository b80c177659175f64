import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
if str(TESTS) not in sys.path:
    sys.path.insert(0, str(TESTS))

import criteria_log  # noqa: E402

LITMUS = TESTS / "litmus"
GOLDEN = TESTS / "golden"


@pytest.fixture(scope="session")
def litmus_dir() -> Path:
    return LITMUS


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


def pytest_terminal_summary(terminalreporter):
    if not criteria_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(criteria_log.RESULTS):
        terminalreporter.write_line(criteria_log.line(n))
