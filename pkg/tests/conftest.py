"""Shared fixtures.  Acceptance tests record one verdict line each; the
lines are printed together at the end of the run."""

import pytest

_LINES = []


class _Recorder:
    def __init__(self, label):
        self.label = label

    def __call__(self, passed, detail=""):
        _LINES.append(f"{self.label:<34} {'PASS' if passed else 'FAIL'}  {detail}")
        return passed


@pytest.fixture
def accept(request):
    """``accept(passed, detail)`` logs a verdict for the current criterion."""
    marker = request.node.get_closest_marker("criterion")
    label = f"[{marker.args[0]:>2}] {marker.args[1]}" if marker else request.node.name
    return _Recorder(label)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES):
        terminalreporter.write_line(line)
