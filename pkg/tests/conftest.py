import pytest

from palm import Workspace


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(r for r in terminalreporter.stats.get(key, [])
                       if "test_acceptance" in r.nodeid and r.when == "call")
    if not reports:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for r in sorted(reports, key=lambda r: r.nodeid):
        mark = "PASS" if r.passed else "FAIL"
        name = r.nodeid.split("::")[-1]
        terminalreporter.write_line(f"[{mark}] {name}")
from palm.corpus import (
    ANY_INT,
    ARG_PARSE,
    COUNT_WORDS,
    INFEASIBLE_BRANCH,
    PALINDROME,
    TUTORIAL,
)


@pytest.fixture(scope="session")
def tutorial_ws() -> Workspace:
    return Workspace.from_source(TUTORIAL.source)


@pytest.fixture(scope="session")
def palindrome_ws() -> Workspace:
    return Workspace.from_source(PALINDROME.source)


@pytest.fixture(scope="session")
def argparse_ws() -> Workspace:
    return Workspace.from_source(ARG_PARSE.source)


@pytest.fixture(scope="session")
def anyint_ws() -> Workspace:
    return Workspace.from_source(ANY_INT.source)


@pytest.fixture(scope="session")
def countwords_ws() -> Workspace:
    return Workspace.from_source(COUNT_WORDS.source)


@pytest.fixture(scope="session")
def infeasible_ws() -> Workspace:
    return Workspace.from_source(INFEASIBLE_BRANCH.source)
