import numpy as np
import pytest

from segsynth.contour import instance_contour
from segsynth.taxonomy import build_taxonomy


@pytest.fixture(scope="session")
def table64():
    """C=255 taxonomy scaled for a 64-px canvas."""
    return build_taxonomy(255, 7, canvas_size=64)


def random_contour(rng, table, k_max=10):
    spec = table[int(rng.integers(1, table.num_categories + 1))]
    K = int(rng.integers(1, k_max + 1))
    return instance_contour(spec, K, int(rng.integers(0, 2**63)))


def square(half, center=(0.0, 0.0)):
    cx, cy = center
    return np.array(
        [[cx - half, cy - half], [cx + half, cy - half], [cx + half, cy + half], [cx - half, cy + half]],
        dtype=np.float64,
    )


ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test if it does not hold."""

    def check(number, title, ok, detail=""):
        ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
