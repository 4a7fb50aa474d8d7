from __future__ import annotations

from pathlib import Path

import pytest

from xarjudge.io import load_pool

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion): exit criterion this test checks")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "acceptance_criterion", None)
    if crit is not None:
        _acceptance.setdefault(crit, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        rep.acceptance_criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance, key=lambda c: int(c.split()[0].lstrip("AC"))):
        outcomes = _acceptance[crit]
        status = "PASS" if all(o == "passed" for o in outcomes) else (
            "SKIP" if all(o == "skipped" for o in outcomes) else "FAIL")
        terminalreporter.write_line(f"{status}  {crit}  ({len(outcomes)} test(s))")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def valid_pool():
    return load_pool(FIXTURES / "valid_pool.json")
