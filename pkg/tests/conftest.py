from __future__ import annotations

import pytest

from weyl_painleve.rootdata import SystemSpec


@pytest.fixture(params=[2, 3, 4, 5, 6], ids=lambda l: f"l{l}")
def spec(request) -> SystemSpec:
    return SystemSpec(request.param)


@pytest.fixture(params=[2, 3], ids=lambda l: f"l{l}")
def small_spec(request) -> SystemSpec:
    return SystemSpec(request.param)


def pytest_terminal_summary(terminalreporter):
    from acceptance_support import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
