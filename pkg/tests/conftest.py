"""Shared pytest wiring.

The acceptance tests register one summary line per criterion; the lines are
echoed in the terminal summary so a plain ``pytest -v`` run shows them even
with output capture on.
"""

from __future__ import annotations

import contextlib

_criterion_lines: list[str] = []


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record 'CRITERION n: PASS|FAIL - title' around a block of asserts."""
    try:
        yield
    except BaseException:
        _criterion_lines.append(f"CRITERION {number}: FAIL - {title}")
        raise
    _criterion_lines.append(f"CRITERION {number}: PASS - {title}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.line(line)
