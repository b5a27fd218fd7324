from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402
from paratwistor import tensor_core  # noqa: E402


@pytest.fixture(autouse=True)
def exact_mode():
    """Every test runs in exact mode unless it asks for float mode itself."""
    with tensor_core.use_mode("exact"):
        yield


@pytest.fixture
def float_mode():
    with tensor_core.use_mode("float"):
        yield


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
