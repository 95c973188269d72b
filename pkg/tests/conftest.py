"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import pytest

_acceptance_results: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    criterion = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _acceptance_results.append(("PASS" if report.passed else "FAIL", criterion))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for verdict, criterion in _acceptance_results:
        terminalreporter.write_line(f"[{verdict}] {criterion}")
