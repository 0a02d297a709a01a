"""Golden-section minimum search over a path oracle, plain and partitioned."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .paths import as_oracle, fill_dyadic
from .report import SearchReport

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0   # 1/phi
INV_PHI2 = 1.0 - INV_PHI                 # 1/phi**2


@dataclass
class GssParams:
    epsilon: float = 0.001
    max_iters: int = 200


class _CountingOracle:
    """Wraps a path oracle; counts calls and tracks the best point seen.

    Ties keep the earlier query, so the reported argmin is the first
    evaluation attaining the minimum.
    """

    def __init__(self, path):
        self._fn = as_oracle(path)
        self.count = 0
        self.best_t = math.nan
        self.best_v = math.inf

    def __call__(self, t: float) -> float:
        v = self._fn(t)
        self.count += 1
        if v < self.best_v:
            self.best_v = v
            self.best_t = t
        return v


def _gss_core(oracle, a, b, params, trace=None):
    """Golden-section loop on [a, b]; returns the iteration count.

    Probes sit at a + (b-a)/phi^2 and a + (b-a)/phi; on a tie the left
    interval is kept.  Each iteration shrinks the bracket by 1/phi, moving
    one endpoint by (b-a)/phi^2.  The loop stops once that shift drops
    below params.epsilon or the iteration budget runs out, and the stopping
    iteration skips its replacement probe, so an n-iteration run costs
    exactly n + 1 interior calls on top of the two endpoint evaluations.
    """
    oracle(a)
    oracle(b)
    t1 = a + (b - a) * INV_PHI2
    t2 = a + (b - a) * INV_PHI
    f1 = oracle(t1)
    f2 = oracle(t2)
    iters = 0
    while iters < params.max_iters:
        iters += 1
        if f1 <= f2:
            shift = b - t2
            b = t2
            t2, f2 = t1, f1
            refresh_left = True
        else:
            shift = t1 - a
            a = t1
            t1, f1 = t2, f2
            refresh_left = False
        if trace is not None:
            trace.append((a, b))
        if shift < params.epsilon or iters >= params.max_iters:
            break
        if refresh_left:
            t1 = a + (b - a) * INV_PHI2
            f1 = oracle(t1)
        else:
            t2 = a + (b - a) * INV_PHI
            f2 = oracle(t2)
    return iters


def golden_section(path, interval=(0.0, 1.0), params: GssParams | None = None,
                   seed: int | None = None, trace: list | None = None) -> SearchReport:
    """Minimise a path oracle on an interval by golden-section bracketing.

    `path` may be a lazily-sampled bridge, a grid path (evaluated by
    piecewise-linear interpolation) or any callable of t.  `trace`, if
    given, collects the (a, b) bracket after every iteration.
    """
    params = params or GssParams()
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must have positive length")
    oracle = _CountingOracle(path)
    t0 = time.perf_counter()
    iters = _gss_core(oracle, a, b, params, trace)
    elapsed = time.perf_counter() - t0
    return SearchReport(
        argmin_t=oracle.best_t, min_value=oracle.best_v, queries=oracle.count,
        wall_time=elapsed, method="golden-section",
        params={"epsilon": params.epsilon, "max_iters": params.max_iters,
                "interval": [a, b], "iterations": iters},
        seed=seed)


def iterative_gss(path, m: int, params: GssParams | None = None,
                  seed: int | None = None) -> SearchReport:
    """Golden-section search on each of 2**m equal panels, keeping the best.

    The two endpoints of [0, 1] are evaluated once up front and always
    compete as candidates; every panel then runs a full golden-section
    pass through a shared query counter.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    params = params or GssParams()
    oracle = _CountingOracle(path)
    k = 2 ** m
    t0 = time.perf_counter()
    oracle(0.0)
    oracle(1.0)
    total_iters = 0
    for i in range(k):
        total_iters += _gss_core(oracle, i / k, (i + 1) / k, params)
    elapsed = time.perf_counter() - t0
    return SearchReport(
        argmin_t=oracle.best_t, min_value=oracle.best_v, queries=oracle.count,
        wall_time=elapsed, method="iterative-gss",
        params={"m": m, "epsilon": params.epsilon, "max_iters": params.max_iters,
                "iterations": total_iters},
        seed=seed)


def naive_gss_error_trial(seed: int, level: int = 10,
                          params: GssParams | None = None):
    """(error, report) of plain golden-section against a fresh grid bridge.

    error = estimate - grid minimum, never negative since the interpolated
    path attains its minimum on the grid.
    """
    grid = fill_dyadic(seed, level)
    rep = golden_section(grid, (0.0, 1.0), params, seed=seed)
    return rep.min_value - grid.grid_min.value, rep


def iterative_gss_error_trial(seed: int, m: int, level: int = 10,
                              params: GssParams | None = None):
    """(error, report) of partitioned golden-section against a fresh grid bridge."""
    grid = fill_dyadic(seed, level)
    rep = iterative_gss(grid, m, params, seed=seed)
    return rep.min_value - grid.grid_min.value, rep
