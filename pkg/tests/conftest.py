from __future__ import annotations

import numpy as np
import pytest

from rclbp import nlmeans

ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption(
        "--neu-root",
        default=None,
        help="NEU-DET images converted to root/<class>/*.pgm|png; enables the dataset criteria",
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def note_skipped(tags, reason: str) -> None:
    for tag in tags:
        ACCEPTANCE_LINES.append(f"[SKIP] {tag} -- {reason}")


@pytest.fixture
def record_criterion():
    """Log one pass/fail line per acceptance criterion, then assert it."""

    def record(tag: str, name: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] {tag} {name}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=nlmeans.available_backends())
def backend(request):
    """Run a test once per available NL-means kernel."""
    previous = nlmeans.get_backend()
    nlmeans.set_backend(request.param)
    yield request.param
    nlmeans.set_backend(previous)
