"""Collects the one-line verdicts of the acceptance suite and prints them at the end."""

import pytest

_VERDICTS = []


class Criterion:
    def __init__(self, name):
        self.name = name
        self.detail = ""


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_report = rep


@pytest.fixture
def criterion(request):
    """Attach a readable name and a measured-value detail to an acceptance test."""
    c = Criterion(request.node.name)
    yield c
    rep = getattr(request.node, "call_report", None)
    verdict = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"{verdict}  {c.name}"
    if c.detail:
        line += f"  [{c.detail}]"
    _VERDICTS.append(line)
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
