from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from weighted_nas.evaluator import SyntheticEvaluator
from weighted_nas.latency import LatencyTable, synthetic_table

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"AC{number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def lut() -> LatencyTable:
    return synthetic_table()


@pytest.fixture(scope="session")
def synthetic() -> SyntheticEvaluator:
    return SyntheticEvaluator()


@pytest.fixture
def constant_lut() -> LatencyTable:
    return LatencyTable(np.full((14, 12), 0.5), 2.0)
