import numpy as np
import pytest

from qpzoom import AxisMap, Intervals, axis_maps, control_grid


def random_intervals(rng, W, H, m, n, spread=0.9):
    """Positive intervals with the right sums; ``spread`` controls how uneven they are."""
    dr = rng.uniform(1 - spread, 1 + spread, m)
    dc = rng.uniform(1 - spread, 1 + spread, n)
    return Intervals(dr / dr.sum() * H, dc / dc.sum() * W)


def random_axis_map(rng, W=None, H=None, w=None, h=None, m=None, n=None) -> AxisMap:
    W = rng.uniform(50, 800) if W is None else W
    H = rng.uniform(50, 800) if H is None else H
    w = int(rng.integers(16, 300)) if w is None else w
    h = int(rng.integers(16, 300)) if h is None else h
    m = int(rng.integers(2, 24)) if m is None else m
    n = int(rng.integers(2, 24)) if n is None else n
    return axis_maps(control_grid(random_intervals(rng, W, H, m, n), W, H), w, h)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
