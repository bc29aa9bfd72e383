from pathlib import Path

import hypothesis
import pytest

from caseforge.case_model import load_case_file
from caseforge.checks import load_rules_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=300, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def load():
    return lambda name: load_case_file(FIXTURES / f"{name}.case.json")


@pytest.fixture
def rules():
    return lambda name: load_rules_file(FIXTURES / f"{name}.rules")


# ---------------------------------------------------------------- acceptance summary

_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, desc = marker.args
    ok = _acceptance.get(number, (desc, True))[1]
    if report.when == "call" or report.failed:
        ok = ok and report.passed
    _acceptance[number] = (desc, ok)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        desc, ok = _acceptance[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {desc}")
