"""Pytest configuration shared across the test suite."""

from __future__ import annotations

import itertools
import logging
import pathlib
import sys
from collections.abc import Generator
from typing import Callable, List

import pytest


# Ensure the src tree is on sys.path so tests can import the local package.
ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(ROOT / "src") not in sys.path:
    sys.path.insert(0, str(ROOT / "src"))

from capacity_urns.core.arithmetic import clear_binomial_cache  # noqa: E402
from capacity_urns.core.counting import ProblemSpec  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Keep runtime overrides from the developer's shell out of the tests."""

    for key in (
        "CAPACITY_URNS_DP_CELL_LIMIT",
        "CAPACITY_URNS_JOBS",
        "CAPACITY_URNS_LOG_LEVEL",
        "CAPACITY_URNS_BINOMIAL_CACHE_SIZE",
    ):
        monkeypatch.delenv(key, raising=False)
    yield
    clear_binomial_cache()
    package_logger = logging.getLogger("capacity_urns")
    package_logger.handlers.clear()
    package_logger.setLevel(logging.NOTSET)


def brute_force(spec: ProblemSpec) -> int:
    """Count by walking every occupancy tuple; only for tiny specs."""

    upper = spec.effective_upper
    values = range(spec.lower, upper + 1)
    return sum(1 for parts in itertools.product(values, repeat=spec.boxes) if sum(parts) == spec.balls)


@pytest.fixture
def brute() -> Callable[[ProblemSpec], int]:
    return brute_force


def grid(max_m: int, max_n: int, max_k: int, *, unbounded: bool = True) -> List[ProblemSpec]:
    specs = []
    for m in range(max_m + 1):
        for n in range(1, max_n + 1):
            for k1 in range(max_k + 1):
                for k2 in range(k1, max_k + 1):
                    specs.append(ProblemSpec(m, n, k1, k2))
                if unbounded:
                    specs.append(ProblemSpec(m, n, k1, None))
    return specs


@pytest.fixture(scope="session")
def acceptance_grid() -> List[ProblemSpec]:
    return grid(12, 6, 12)
