from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# one summary line per acceptance criterion, printed after the run
_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::test_criterion_")[1]
        number, _, title = name.partition("_")
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _CRITERIA[int(number)] = (verdict, title.replace("_", " "), report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        verdict, title, duration = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({duration:.2f} s)")
