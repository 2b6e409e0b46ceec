"""Shared test plumbing.

Tests marked @pytest.mark.acceptance(num, title) are the acceptance gate;
after the run a summary section prints one PASS/FAIL line per criterion.
"""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, title): tie a test to one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, title = marker.args
    if report.when == "call":
        _RESULTS[num] = (title, report.outcome)
    elif report.failed:  # setup error / teardown failure
        _RESULTS[num] = (title, "failed")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, outcome = _RESULTS[num]
        tag = {"passed": "PASS", "failed": "FAIL"}.get(outcome,
                                                       outcome.upper())
        terminalreporter.write_line(f"criterion {num:2d} {tag:4s}  {title}")
