"""Stochastic paths on [0, 1]: lazy Brownian bridges, dyadic grids, Cauchy walks.

A LazyBridgePath materialises a Brownian bridge one query at a time; any
query order yields a consistent realisation because each new point is drawn
from the bridge law conditioned on its two nearest sampled neighbours.
GridPath is the dense snapshot on a dyadic grid, used as the ground-truth
oracle by the search benchmarks.  Cauchy paths are simulated directly on
the grid with exact inverse-CDF increments.
"""
from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .rng import make_rng

BRIDGE = "brownian_bridge"
CAUCHY = "cauchy"

# inverse-CDF sampling stops once |cdf(v) - p| falls below this
PPF_RESIDUAL_TOL = 1e-10


class GridMin(NamedTuple):
    time: float
    value: float


class LazyBridgePath:
    """Brownian bridge on [0, 1], sampled lazily.

    The path starts at (0, 0).  When `pinned` the right endpoint is fixed
    at (1, 0); otherwise the endpoint value W is a standard normal draw
    made at construction.  A query at an unsampled time t finds the
    nearest sampled neighbours t_l < t < t_r with values v_l, v_r and
    draws from the conditional bridge law

        mean = v_l + (t - t_l) * (v_r - v_l) / (t_r - t_l)
        var  = (t - t_l) * (t_r - t) / (t_r - t_l)

    The draw is stored, so re-querying any time returns the same value and
    the realisation is a function of the seed and the query sequence only.
    """

    def __init__(self, seed: int, pinned: bool = True):
        self.seed = int(seed)
        self.pinned = bool(pinned)
        self.rng = make_rng(seed)
        w = 0.0 if pinned else float(self.rng.standard_normal())
        self._times = [0.0, 1.0]
        self._values = [0.0, w]

    @property
    def n_sampled(self) -> int:
        return len(self._times)

    def sampled(self) -> tuple[np.ndarray, np.ndarray]:
        """Copies of the sampled times and values, in time order."""
        return np.array(self._times), np.array(self._values)

    def query(self, t: float) -> float:
        """Value of the bridge at t, sampling it first if needed."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"query time {t} outside [0, 1]")
        i = bisect.bisect_left(self._times, t)
        if i < len(self._times) and self._times[i] == t:
            return self._values[i]
        tl, tr = self._times[i - 1], self._times[i]
        vl, vr = self._values[i - 1], self._values[i]
        gap = tr - tl
        mean = vl + (t - tl) * (vr - vl) / gap
        var = (t - tl) * (tr - t) / gap
        v = mean + math.sqrt(var) * float(self.rng.standard_normal())
        self._times.insert(i, t)
        self._values.insert(i, v)
        return v

    def value_at(self, t: float) -> float:
        """Stored value at an already-sampled time (no new draw)."""
        i = bisect.bisect_left(self._times, float(t))
        if i == len(self._times) or self._times[i] != t:
            raise KeyError(f"time {t} has not been sampled")
        return self._values[i]


def new_bridge(seed: int, pinned: bool = True) -> LazyBridgePath:
    """Fresh lazily-sampled Brownian bridge."""
    return LazyBridgePath(seed, pinned=pinned)


@dataclass(frozen=True)
class GridPath:
    """A path realised on the dyadic grid of 2**level + 1 uniform points."""

    level: int
    times: np.ndarray
    values: np.ndarray
    kind: str
    seed: int | None = None

    def __post_init__(self):
        n = 2 ** self.level
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.times) != n + 1 or len(self.values) != n + 1:
            raise ValueError(f"level {self.level} grid needs {n + 1} points")
        if self.values[0] != 0.0:
            raise ValueError("grid paths start at 0")
        if self.kind == BRIDGE and self.values[-1] != 0.0:
            raise ValueError("bridge grid paths are pinned to 0 at t = 1")

    @property
    def grid_min(self) -> GridMin:
        """Grid minimum; ties go to the earliest time attaining it."""
        i = int(np.argmin(self.values))
        return GridMin(float(self.times[i]), float(self.values[i]))

    def interp(self, t: float) -> float:
        """Piecewise-linear value of the grid path at an arbitrary time."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"time {t} outside [0, 1]")
        n = len(self.values) - 1
        x = t * n
        i = int(x)
        if i >= n:
            return float(self.values[n])
        frac = x - i
        return float(self.values[i] + frac * (self.values[i + 1] - self.values[i]))


def dyadic_times(level: int) -> np.ndarray:
    # exact binary floats k / 2**level
    return np.arange(2 ** level + 1) / float(2 ** level)


def fill_dyadic(path_or_seed: LazyBridgePath | int, level: int) -> GridPath:
    """Sample every time k/2**level of a pinned bridge and snapshot the grid.

    The fill order is fixed: midpoints first, breadth-first by dyadic level,
    left to right within a level.  Given an int seed a fresh pinned bridge
    is built and filled with per-level batched draws; given a LazyBridgePath
    the fill goes through query() so it stays consistent with whatever has
    been sampled already.  Both routes consume the generator identically,
    so the grid is a pure function of the seed.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if isinstance(path_or_seed, LazyBridgePath):
        path = path_or_seed
        if not path.pinned:
            raise ValueError("dyadic grid snapshots require a pinned bridge")
    else:
        path = new_bridge(int(path_or_seed), pinned=True)

    times = dyadic_times(level)
    if path.n_sampled == 2:
        values = _fill_fresh(path, level)
    else:
        for d in range(1, level + 1):
            scale = 2.0 ** (-d)
            for k in range(2 ** (d - 1)):
                path.query((2 * k + 1) * scale)
        values = np.array([path.value_at(t) for t in times])
    return GridPath(level=level, times=times, values=values, kind=BRIDGE, seed=path.seed)


def _fill_fresh(path: LazyBridgePath, level: int) -> np.ndarray:
    # batched per-level refinement; draw order matches the query loop
    v = np.array(path._values)
    for d in range(1, level + 1):
        mid = 0.5 * (v[:-1] + v[1:])
        std = math.sqrt(2.0 ** -(d + 1))
        new = mid + std * path.rng.standard_normal(len(mid))
        out = np.empty(2 * len(v) - 1)
        out[::2] = v
        out[1::2] = new
        v = out
    path._times = dyadic_times(level).tolist()
    path._values = v.tolist()
    return v.copy()


def simulate_bridge_batch(seed: int, level: int, count: int) -> np.ndarray:
    """(count, 2**level + 1) array of independent pinned-bridge grid values."""
    rng = make_rng(seed)
    v = np.zeros((count, 2))
    for d in range(1, level + 1):
        mid = 0.5 * (v[:, :-1] + v[:, 1:])
        std = math.sqrt(2.0 ** -(d + 1))
        new = mid + std * rng.standard_normal(mid.shape)
        out = np.empty((count, 2 * v.shape[1] - 1))
        out[:, ::2] = v
        out[:, 1::2] = new
        v = out
    return v


def simulate_cauchy(seed: int, level: int) -> GridPath:
    """Cauchy process on the dyadic grid, increments exact in law.

    Each of the 2**level increments over a step h = 2**-level is
    h * tan(pi * (U - 1/2)) with U uniform, the inverse CDF of the
    Cauchy(0, h) law.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    rng = make_rng(seed)
    n = 2 ** level
    u = rng.random(n)
    inc = np.tan(np.pi * (u - 0.5)) / n
    values = np.concatenate([[0.0], np.cumsum(inc)])
    return GridPath(level=level, times=dyadic_times(level), values=values,
                    kind=CAUCHY, seed=int(seed))


def simulate_cauchy_batch(seed: int, level: int, count: int) -> np.ndarray:
    """(count, 2**level + 1) array of independent Cauchy grid values."""
    rng = make_rng(seed)
    n = 2 ** level
    u = rng.random((count, n))
    inc = np.tan(np.pi * (u - 0.5)) / n
    out = np.zeros((count, n + 1))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def as_oracle(path) -> Callable[[float], float]:
    """Uniform callable view of a path: t in [0, 1] -> value."""
    if isinstance(path, LazyBridgePath):
        return path.query
    if isinstance(path, GridPath):
        return path.interp
    if callable(path):
        return path
    raise TypeError(f"cannot evaluate object of type {type(path).__name__} as a path")


# ---------------------------------------------------------------------------
# Cauchy bridge marginal


class CauchyBridgeCdf:
    """Law of a Cauchy bridge at its midpoint, parametrised by half-span u.

    For a Cauchy process conditioned on its endpoints, the centred midpoint
    value v over a window of half-width u has density
    f1(u + v) * f1(u - v) / f2(2u), with f_s the Cauchy(0, s) density.  The
    CDF integrates in closed form:

        G(u, v) = 1/2 + [log(((u+v)^2 + 1) / ((u-v)^2 + 1))
                         + 2u (atan(u+v) - atan(u-v))] / (4 pi u)

    The log ratio is evaluated as log1p(4uv / ((u-v)^2 + 1)) to keep the
    tails cancellation-safe.
    """

    def __init__(self, u: float):
        u = float(u)
        if not u > 0.0:
            raise ValueError("half-span u must be positive")
        self.u = u

    def cdf(self, v):
        u = self.u
        v = np.asarray(v, dtype=float)
        log_term = np.log1p(4.0 * u * v / ((u - v) ** 2 + 1.0))
        atan_term = 2.0 * u * (np.arctan(u + v) - np.arctan(u - v))
        out = (log_term + atan_term) / (4.0 * np.pi * u) + 0.5
        return float(out) if out.ndim == 0 else out

    def pdf(self, v):
        u = self.u
        v = np.asarray(v, dtype=float)
        f1p = 1.0 / (np.pi * (1.0 + (u + v) ** 2))
        f1m = 1.0 / (np.pi * (1.0 + (u - v) ** 2))
        f2 = 2.0 / (np.pi * (4.0 + (2.0 * u) ** 2))
        out = f1p * f1m / f2
        return float(out) if out.ndim == 0 else out

    def ppf(self, p: float) -> float:
        """Quantile by bracketed root-finding; |cdf(v) - p| <= 1e-10."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie strictly inside (0, 1)")
        lo, hi = -1.0, 1.0
        while self.cdf(lo) > p:
            lo *= 8.0
        while self.cdf(hi) < p:
            hi *= 8.0
        v = brentq(lambda x: self.cdf(x) - p, lo, hi, xtol=1e-14, rtol=8.9e-16,
                   maxiter=200)
        if abs(self.cdf(v) - p) > PPF_RESIDUAL_TOL:
            raise RuntimeError(f"quantile solve residual above {PPF_RESIDUAL_TOL}")
        return float(v)


def cauchy_bridge_cdf(u: float, v) :
    return CauchyBridgeCdf(u).cdf(v)


def cauchy_bridge_sample(u: float, p: float) -> float:
    """Inverse-CDF sample of the half-span-u Cauchy bridge midpoint at quantile p."""
    return CauchyBridgeCdf(u).ppf(p)


# ---------------------------------------------------------------------------
# Grid I/O


def save_grid_csv(grid: GridPath, out_path: str, extra_meta: dict | None = None) -> None:
    """Write 't,value' rows at 17 significant digits plus a JSON sidecar.

    The sidecar lands at '<out_path>.meta.json' and carries at least
    {seed, level, kind}; extra_meta entries are merged on top.
    """
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in zip(grid.times, grid.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])
    meta = {"seed": grid.seed, "level": grid.level, "kind": grid.kind}
    if extra_meta:
        meta.update(extra_meta)
    with open(f"{out_path}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_grid_csv(path: str) -> GridPath:
    """Read a grid CSV written by save_grid_csv (sidecar required)."""
    times, values = load_walk_csv(path)
    with open(f"{path}.meta.json") as fh:
        meta = json.load(fh)
    return GridPath(level=int(meta["level"]), times=times, values=values,
                    kind=meta["kind"], seed=meta.get("seed"))


def load_walk_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a bare 't,value' CSV into time and value arrays.

    Malformed rows raise ValueError naming the offending line number.
    """
    times: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected a 't,value' header")
        if [c.strip() for c in header[:2]] != ["t", "value"]:
            raise ValueError(f"{path}: line 1: expected 't,value' header")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: line {lineno}: expected two columns")
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: could not parse '{','.join(row[:2])}'"
                ) from None
    return np.array(times), np.array(values)
