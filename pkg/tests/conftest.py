import itertools
from fractions import Fraction

import numpy as np
import pytest

from boxkit import ProductSpace

CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(label, passed, detail)``."""

    def record(label, passed, detail=""):
        CRITERIA.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}  {detail}")


def brute_cylinder(space, x, K):
    """All outcomes agreeing with x on the coordinates in the mask K."""
    return [y for y in itertools.product(*map(range, space.sizes))
            if all(y[i] == x[i] for i in range(space.n) if K >> i & 1)]


def random_space(rng, n, max_size=3, zero_atoms=False):
    alphabets = []
    for i in range(n):
        size = int(rng.integers(1, max_size + 1))
        raw = [int(v) for v in rng.integers(1, 6, size=size)]
        if zero_atoms and size > 1 and rng.random() < 0.6:
            raw[int(rng.integers(size))] = 0
        total = sum(raw)
        alphabets.append([Fraction(v, total) for v in raw])
    return ProductSpace(alphabets)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
