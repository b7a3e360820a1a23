"""Collects one pass/fail line per acceptance criterion and prints them
after the run, so they show up without ``-s``."""
import pytest

CRITERIA = {}


class CriterionLog:
    def __init__(self, label):
        self.label = label
        self.details = []

    def note(self, text):
        self.details.append(text)


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    label = marker.args[0] if marker else request.node.name
    log = CriterionLog(label)
    CRITERIA[request.node.nodeid] = [log, None]
    return log


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    entry = CRITERIA.get(item.nodeid)
    if entry is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        entry[1] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for log, passed in sorted(CRITERIA.values(), key=lambda e: _order(e[0].label)):
        status = "PASS" if passed else "FAIL"
        detail = "; ".join(log.details)
        terminalreporter.write_line(f"{log.label} {status}" + (f"  ({detail})" if detail else ""))


def _order(label):
    digits = "".join(ch for ch in label.split()[0] if ch.isdigit())
    return int(digits) if digits else 0
