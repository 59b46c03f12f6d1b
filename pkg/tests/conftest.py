from __future__ import annotations

import pytest

from distorder import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.get_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


ACCEPTANCE_COUNT = 10
_acceptance_lines: dict[int, str] = {}
_acceptance_selected = False


@pytest.fixture
def acceptance():
    """Record the outcome of one acceptance criterion for the summary report."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _acceptance_lines[number] = line
        print(line)

    return record


def pytest_collection_modifyitems(session, config, items):
    global _acceptance_selected
    _acceptance_selected = any(item.path.name == "test_acceptance.py" for item in items)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_selected:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_COUNT + 1):
        terminalreporter.write_line(_acceptance_lines.get(n, f"criterion {n:>2} FAIL  no result recorded"))
