import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from topktree.dataset import BinaryDataset

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def random_dataset(rng, d_max=8, n_max=64, c_max=2, dup=True):
    """Small random instance; sometimes with duplicated or constant columns."""
    d = int(rng.integers(1, d_max + 1))
    n = int(rng.integers(1, n_max + 1))
    X = rng.integers(0, 2, (n, d))
    if dup and d > 1 and rng.random() < 0.3:
        X[:, -1] = X[:, 0]
    if rng.random() < 0.1:
        X[:, 0] = 0
    C = int(rng.integers(2, c_max + 1))
    y = rng.integers(0, C, n)
    return BinaryDataset(X, y, n_classes=C)


@st.composite
def datasets(draw, d_max=6, n_max=40, c_max=3, min_n=1):
    d = draw(st.integers(1, d_max))
    n = draw(st.integers(min_n, n_max))
    C = draw(st.integers(2, c_max))
    X = draw(st.lists(st.lists(st.integers(0, 1), min_size=d, max_size=d), min_size=n, max_size=n))
    y = draw(st.lists(st.integers(0, C - 1), min_size=n, max_size=n))
    return BinaryDataset(np.array(X, dtype=np.uint8), np.array(y), n_classes=C)


@pytest.fixture
def report():
    """Record one PASS/FAIL line; all lines are echoed in the terminal summary."""

    def _report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
