import os
import sys

import pytest

from borelh.exactalg import set_check_mode

sys.path.insert(0, os.path.dirname(__file__))

_acceptance = {}


@pytest.fixture(autouse=True, scope="session")
def _check_transforms():
    # verify every Smith form transform identity while testing
    set_check_mode(True)
    yield
    set_check_mode(False)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        num = name.split("_")[2]
        title = name.split("_", 3)[3].replace("_", " ")
        outcome = "PASS" if _acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {int(num):2d} {outcome}  {title}")
