"""Shared fixtures: default lexicon/pairs/config and the golden files."""
import json
from pathlib import Path

import pytest

from navscore import ConflictPairSet, DirectionLexicon, MetricConfig, lexical_backend

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def backend():
    return lexical_backend()


@pytest.fixture(scope="session")
def lexicon():
    return DirectionLexicon.default()


@pytest.fixture(scope="session")
def pairs():
    return ConflictPairSet.default()


@pytest.fixture(scope="session")
def cfg():
    return MetricConfig()


@pytest.fixture(scope="session")
def golden_expected() -> dict:
    return json.loads((FIXTURES / "golden_expected.json").read_text("utf-8"))


_criterion_lines: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion verdict and fail the test if unmet.

    The line is printed immediately (visible with -s or on failure) and
    repeated in a terminal-summary section so every run shows one
    [PASS]/[FAIL] line per criterion regardless of output capture.
    """

    def _report(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _criterion_lines.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
