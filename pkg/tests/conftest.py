import json
from pathlib import Path

import pytest

from quantscan.rules import load_builtin_rules
from quantscan.scanning import ScanOptions

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"


@pytest.fixture(scope="session")
def ruleset():
    return load_builtin_rules()


@pytest.fixture(scope="session")
def options():
    return ScanOptions()


@pytest.fixture(scope="session")
def expected():
    """Frozen per-tree expected findings and scores for the corpus."""
    with open(FIXTURES / "expected_findings.json", encoding="utf-8") as fh:
        return json.load(fh)


# filled by the acceptance tests; echoed after the run so the log carries
# one line per release criterion
CRITERION_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_RESULTS:
        terminalreporter.write_line(line)
