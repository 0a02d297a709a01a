"""Shared helpers for the test suite."""
import numpy as np
import pytest

from pathmin.rng import make_rng
from pathmin.scmap import WalkPolygon


def make_bridge_walk(seed: int, n: int, beta: float = 1.0) -> WalkPolygon:
    """Random n-edge walk pinned to 0 at both ends, step scale 1/sqrt(n).

    Built directly from generator draws so tests do not depend on the
    package's own path samplers.
    """
    rng = make_rng(seed)
    times = np.arange(n + 1) / n
    steps = rng.standard_normal(n) / np.sqrt(n)
    w = np.concatenate([[0.0], np.cumsum(steps)])
    w -= times * w[-1]
    return WalkPolygon(times=times, values=w, beta=beta)


@pytest.fixture
def bridge_walk():
    return make_bridge_walk
