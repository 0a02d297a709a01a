"""Golden-section search mechanics and its partitioned variant."""
import numpy as np
import pytest

from pathmin.golden import (
    INV_PHI,
    INV_PHI2,
    GssParams,
    golden_section,
    iterative_gss,
    iterative_gss_error_trial,
    naive_gss_error_trial,
)
from pathmin.paths import fill_dyadic


def recording(fn, log):
    def wrapped(t):
        log.append(t)
        return fn(t)
    return wrapped


def test_first_probes_sit_at_golden_ratios():
    log = []
    golden_section(recording(lambda t: (t - 0.3) ** 2, log), (0.0, 1.0),
                   GssParams(epsilon=0.0, max_iters=1))
    assert log[0] == 0.0
    assert log[1] == 1.0
    assert abs(log[2] - INV_PHI2) < 1e-12
    assert abs(log[3] - INV_PHI) < 1e-12


def test_probe_positions_respect_subinterval():
    log = []
    a, b = 0.25, 0.75
    golden_section(recording(lambda t: (t - 0.4) ** 2, log), (a, b),
                   GssParams(epsilon=0.0, max_iters=1))
    assert abs(log[2] - (a + (b - a) * INV_PHI2)) < 1e-12
    assert abs(log[3] - (a + (b - a) * INV_PHI)) < 1e-12


@pytest.mark.parametrize("iters", [1, 2, 5, 9, 40])
def test_one_new_call_per_iteration_after_setup(iters):
    log = []
    rep = golden_section(recording(lambda t: (t - 0.3) ** 2, log), (0.0, 1.0),
                         GssParams(epsilon=0.0, max_iters=iters))
    assert rep.params["iterations"] == iters
    assert rep.queries == iters + 3
    assert len(log) == rep.queries


def test_bracket_shrinks_by_golden_ratio():
    trace = []
    golden_section(lambda t: (t - 0.3) ** 2, (0.0, 1.0),
                   GssParams(epsilon=0.0, max_iters=30), trace=trace)
    widths = np.array([b - a for a, b in trace])
    assert np.all(np.abs(widths[1:] / widths[:-1] - INV_PHI) < 1e-9)
    assert abs(widths[0] - INV_PHI) < 1e-12


def test_epsilon_stops_once_shift_is_small():
    trace = []
    rep = golden_section(lambda t: (t - 0.3) ** 2, (0.0, 1.0),
                         GssParams(epsilon=0.01), trace=trace)
    a, b = trace[-1]
    # the stopping iteration saw its endpoint move by under epsilon
    assert (b - a) * INV_PHI2 / INV_PHI < 0.01
    assert rep.params["iterations"] == len(trace)


def test_tie_keeps_left_interval():
    trace = []
    golden_section(lambda t: 0.0, (0.0, 1.0),
                   GssParams(epsilon=0.0, max_iters=10), trace=trace)
    # constant oracle ties every comparison, so the right endpoint contracts
    assert all(a == 0.0 for a, _ in trace)


def test_constant_path_reports_first_query():
    rep = golden_section(lambda t: 0.0, (0.0, 1.0), GssParams(max_iters=10))
    assert rep.argmin_t == 0.0
    assert rep.min_value == 0.0


def test_finds_smooth_minimum():
    rep = golden_section(lambda t: (t - 0.3) ** 2, (0.0, 1.0),
                         GssParams(epsilon=1e-6, max_iters=200))
    assert abs(rep.argmin_t - 0.3) < 1e-5
    rep = golden_section(np.cos, (0.0, 6.0), GssParams(epsilon=1e-7, max_iters=200))
    assert abs(rep.argmin_t - np.pi) < 1e-6


def test_best_value_is_min_of_all_queries():
    log = []
    grid = fill_dyadic(17, 8)
    rep = golden_section(recording(grid.interp, log), (0.0, 1.0),
                         GssParams(epsilon=0.001))
    assert rep.min_value == min(grid.interp(t) for t in log)
    assert rep.method == "golden-section"


def test_degenerate_interval_raises():
    with pytest.raises(ValueError):
        golden_section(lambda t: t, (0.5, 0.5))
    with pytest.raises(ValueError):
        golden_section(lambda t: t, (0.7, 0.2))


def test_iterative_covers_all_panels():
    log = []
    rep = iterative_gss(recording(lambda t: (t - 0.55) ** 2, log), 2,
                        GssParams(epsilon=0.01, max_iters=50))
    assert rep.method == "iterative-gss"
    assert log[0] == 0.0 and log[1] == 1.0
    # every quarter panel gets probed
    for lo in (0.0, 0.25, 0.5, 0.75):
        assert any(lo < t < lo + 0.25 for t in log[2:])
    assert abs(rep.argmin_t - 0.55) < 0.01
    assert rep.queries == len(log)


def test_iterative_never_beats_endpoint_values():
    grid = fill_dyadic(23, 8)
    rep = iterative_gss(grid, 3, GssParams(epsilon=0.001))
    assert rep.min_value <= grid.interp(0.0)
    assert rep.min_value <= grid.interp(1.0)


def test_iterative_m0_equals_plain_run():
    grid = fill_dyadic(29, 8)
    single = golden_section(grid, (0.0, 1.0), GssParams(epsilon=0.001))
    whole = iterative_gss(grid, 0, GssParams(epsilon=0.001))
    assert whole.min_value <= single.min_value
    assert whole.argmin_t == single.argmin_t
    # same bracketing plus one duplicate endpoint pair
    assert whole.queries == single.queries + 2


def test_iterative_rejects_negative_m():
    with pytest.raises(ValueError):
        iterative_gss(lambda t: t, -1)


def test_error_trials_are_nonnegative_and_deterministic():
    for seed in range(5):
        err, rep = naive_gss_error_trial(seed, level=8)
        err2, _ = naive_gss_error_trial(seed, level=8)
        assert err >= 0.0
        assert err == err2
        assert rep.seed == seed
    err, rep = iterative_gss_error_trial(3, m=2, level=8)
    assert err >= 0.0
    assert rep.params["m"] == 2


def test_partitioning_beats_naive_on_average():
    # coarse version of the benchmark ordering, 40 seeds at level 8
    naive = np.array([naive_gss_error_trial(s, level=8)[0] for s in range(40)])
    part = np.array([iterative_gss_error_trial(s, m=3, level=8)[0]
                     for s in range(40)])
    assert part.mean() < naive.mean()
