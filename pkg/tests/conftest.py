from __future__ import annotations

import pytest

from quasispline.quadfield import GOLDEN
from quasispline.tiling import generate_fibonacci_chain

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def chain():
    return generate_fibonacci_chain((-60, 60))


@pytest.fixture(scope="session")
def theta():
    return GOLDEN.beta ** 2


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
