from __future__ import annotations

import time

import pytest

from stopped_occupancy.sim import ModelParams, simulate

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


_SESSION_START = [0.0]
SUITE_LIMIT_SECONDS = 300.0


def pytest_sessionstart(session):
    _SESSION_START[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
        failed = len(terminalreporter.stats.get("failed", [])) + len(terminalreporter.stats.get("error", []))
        elapsed = time.perf_counter() - _SESSION_START[0]
        ok = failed == 0 and elapsed < SUITE_LIMIT_SECONDS
        terminalreporter.write_line(
            f"suite       : {'PASS' if ok else 'FAIL'}  {failed} failed, {elapsed:.0f} s (limit {SUITE_LIMIT_SECONDS:.0f} s)"
        )


_BATCHES: dict = {}


def stopped_batch(n: int, m: int = 0, ell: int = 0, reps: int = 1000, seed: int = 1, K: int = 1):
    """Session-wide cache of simulated batches; large runs are shared between test modules."""
    key = (n, m, ell, reps, seed, K)
    if key not in _BATCHES:
        _BATCHES[key] = simulate(ModelParams(n, m, ell), K=K, reps=reps, seed=seed)
    return _BATCHES[key]


@pytest.fixture(scope="session")
def ccp_1e4():
    """Coupon-collector stopping with n = 10^4 boxes, 10^5 replicates."""
    return stopped_batch(10_000, reps=100_000, seed=2024)
