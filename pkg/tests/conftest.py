"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import numpy as np
import pytest

# criterion number -> (passed, measured text); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def report(criterion: int, passed: bool, measured: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), measured)
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {measured}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[c]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {c}: {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
