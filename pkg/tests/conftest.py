"""Shared test machinery.

The acceptance tests (tests/test_acceptance.py, named test_criterion_<k>)
report one summary line per criterion.  A passing test records its own
detail string through the `acceptance` fixture; failures are caught by the
report hook so the summary still shows a line for them.
"""
from __future__ import annotations

import re

import pytest

_RESULTS: dict[int, tuple[str, str]] = {}
_CRIT = re.compile(r"test_criterion_(\d+)")


@pytest.fixture
def acceptance():
    """Recorder: call acceptance(k, detail) once the criterion has passed."""

    def _record(k: int, detail: str) -> None:
        _RESULTS[k] = ("PASS", detail)

    return _record


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.failed:
        lines = report.longreprtext.strip().splitlines()
        detail = lines[-1].strip() if lines else "failed"
        _RESULTS[k] = ("FAIL", detail[:160])
    elif report.when == "call" and report.skipped:
        _RESULTS.setdefault(k, ("FAIL", "skipped"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        status, detail = _RESULTS[k]
        terminalreporter.write_line(f"ACCEPTANCE {k} {status} - {detail}")
