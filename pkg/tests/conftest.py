"""Shared pytest hooks for the acceptance summary.

Tests in test_acceptance.py are marked with their criterion number and
register a one-line detail string while they run; a terminal-summary hook
prints the collected lines in order, so every full test run ends with an
explicit pass/fail verdict per acceptance criterion.
"""

import pytest

_TITLES = {}
_DETAILS = {}
_OUTCOMES = {}


def register_criterion(number, title, detail):
    """Attach the summary line for one acceptance criterion.

    Call before the final asserts so the measured numbers show up in the
    summary even when the criterion fails.
    """
    number = int(number)
    _TITLES[number] = title
    _DETAILS[number] = detail


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): maps a test to an acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number = int(marker.args[0])
    _OUTCOMES[number] = report.passed
    if len(marker.args) > 1:
        _TITLES.setdefault(number, marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        verdict = "PASS" if _OUTCOMES[number] else "FAIL"
        title = _TITLES.get(number, "")
        detail = _DETAILS.get(number)
        line = f"criterion {number:2d} {title}: {verdict}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
