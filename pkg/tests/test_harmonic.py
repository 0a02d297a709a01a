"""Edge harmonic measures, bisection strategies and the walker oracle."""
import bisect
import csv

import numpy as np
import pytest

from conftest import make_bridge_walk
from pathmin.harmonic import (
    EdgeMeasures,
    HmcParams,
    choose_edge,
    edge_measures,
    harmonic_bisection_search,
    mc_hitting_oracle,
    save_measures_csv,
)
from pathmin.paths import as_oracle, new_bridge
from pathmin.rng import derive_seed, make_rng
from pathmin.scmap import ScSolverError, WalkPolygon


def flat_polygon(times):
    times = np.asarray(times, dtype=float)
    return WalkPolygon(times=times, values=np.zeros(len(times)), beta=0.0)


# ---------------------------------------------------------------------------
# Analytic measures


@pytest.mark.parametrize("solver", ["full", "perturbative"])
def test_flat_weights_equal_edge_widths(solver):
    # arcsin(sqrt(sin^2(pi t / 2))) telescopes back to t itself
    t = np.array([0.0, 0.2, 0.45, 0.7, 1.0])
    em = edge_measures(flat_polygon(t), solver=solver)
    assert np.max(np.abs(em.weights - np.diff(t))) < 1e-12
    assert em.stderr is None


def test_flat_equal_dyadic_weights_are_quarters():
    em = edge_measures(flat_polygon([0.0, 0.25, 0.5, 0.75, 1.0]))
    assert np.max(np.abs(em.weights - 0.25)) < 1e-12


def test_single_edge_gets_all_the_measure():
    em = edge_measures(flat_polygon([0.0, 1.0]))
    assert em.weights.shape == (1,)
    assert em.weights[0] == 1.0


@pytest.mark.parametrize("beta", [0.3, 1.0])
def test_weights_are_a_probability_vector(beta):
    for seed in range(6):
        poly = make_bridge_walk(seed, 7, beta=beta)
        em = edge_measures(poly, solver="full")
        assert np.all(em.weights >= 0.0)
        assert abs(em.weights.sum() - 1.0) < 1e-10


def test_weights_reverse_with_the_walk():
    for seed in range(4):
        poly = make_bridge_walk(seed, 6, beta=0.6)
        rev = WalkPolygon(times=1.0 - poly.times[::-1],
                          values=poly.values[::-1], beta=0.6)
        w = edge_measures(poly, solver="full").weights
        w_rev = edge_measures(rev, solver="full").weights
        assert np.max(np.abs(w_rev - w[::-1])) < 1e-9


def test_perturbative_weights_match_full_at_small_amplitude():
    beta = 0.04
    for seed in range(10):
        poly = make_bridge_walk(seed, 8, beta=beta)
        w_full = edge_measures(poly, solver="full").weights
        w_pert = edge_measures(poly, solver="perturbative").weights
        assert np.max(np.abs(w_full - w_pert)) < 20.0 * beta ** 2


def test_edge_measures_accepts_warm_start():
    poly = make_bridge_walk(11, 6, beta=0.5)
    cold = edge_measures(poly, solver="full")
    z = np.sin(0.5 * np.pi * poly.times) ** 2
    warm = edge_measures(poly, solver="full", initial_guess=z)
    assert np.max(np.abs(cold.weights - warm.weights)) < 1e-9


def test_unknown_solver_raises():
    with pytest.raises(ValueError):
        edge_measures(flat_polygon([0.0, 1.0]), solver="magic")


# ---------------------------------------------------------------------------
# Edge choice


def test_max_measure_takes_argmax():
    em = EdgeMeasures(times=np.array([0.0, 0.3, 0.6, 1.0]),
                      weights=np.array([0.2, 0.5, 0.3]))
    # edges are numbered 0-based, so the 0.5 weight sits at index 1
    assert choose_edge(em, HmcParams(strategy="max_measure")) == 1


def test_max_measure_breaks_ties_low():
    em = EdgeMeasures(times=np.linspace(0.0, 1.0, 5),
                      weights=np.full(4, 0.25))
    assert choose_edge(em, HmcParams(strategy="max_measure")) == 0


def test_max_measure_ignores_rescaling():
    em = EdgeMeasures(times=np.array([0.0, 0.3, 0.6, 1.0]),
                      weights=np.array([0.2, 0.5, 0.3]))
    scaled = EdgeMeasures(times=em.times, weights=7.0 * em.weights)
    params = HmcParams(strategy="max_measure")
    assert choose_edge(scaled, params) == choose_edge(em, params)


def test_sample_measure_frequencies():
    w = np.array([0.2, 0.5, 0.3])
    em = EdgeMeasures(times=np.array([0.0, 0.3, 0.6, 1.0]), weights=w)
    params = HmcParams(strategy="sample_measure")
    rng = make_rng(17)
    n = 100_000
    counts = np.zeros(3)
    for _ in range(n):
        counts[choose_edge(em, params, rng)] += 1
    freq = counts / n
    se = np.sqrt(w * (1.0 - w) / n)
    assert np.all(np.abs(freq - w) < 3.0 * se)


def test_sample_measure_needs_rng_and_known_strategy():
    em = EdgeMeasures(times=np.array([0.0, 1.0]), weights=np.array([1.0]))
    with pytest.raises(ValueError):
        choose_edge(em, HmcParams(strategy="sample_measure"))
    with pytest.raises(ValueError):
        choose_edge(em, HmcParams(strategy="best_measure"), make_rng(0))


# ---------------------------------------------------------------------------
# Guided bisection search


def test_flat_search_bisects_widest_edge_leftmost_first():
    rep = harmonic_bisection_search(new_bridge(5), 9,
                                    HmcParams(beta=0.0, seed=5))
    assert rep.params["midpoints"] == [0.5, 0.25, 0.75, 0.125, 0.375,
                                       0.625, 0.875, 0.0625, 0.1875]
    assert rep.queries == 11
    assert rep.method == "harmonic-bisection"
    assert rep.params["fallbacks"] == 0


def test_budget_one_only_queries_the_midpoint():
    rep = harmonic_bisection_search(new_bridge(1), 1, HmcParams(beta=0.0))
    assert rep.params["midpoints"] == [0.5]
    assert rep.queries == 3


def test_search_rejects_bad_budget_and_unpinned_paths():
    with pytest.raises(ValueError):
        harmonic_bisection_search(new_bridge(1), 0)
    with pytest.raises(ValueError):
        harmonic_bisection_search(lambda t: t, 3)


def test_search_is_deterministic_per_seed():
    params = HmcParams(beta=1.0, strategy="sample_measure", solver="full", seed=3)
    a = harmonic_bisection_search(new_bridge(8), 8, params)
    b = harmonic_bisection_search(new_bridge(8), 8, params)
    assert a.params["midpoints"] == b.params["midpoints"]
    assert a.min_value == b.min_value


def test_solver_failure_falls_back_to_uniform_weights(monkeypatch):
    def boom(poly, initial_guess=None):
        raise ScSolverError("forced failure")

    monkeypatch.setattr("pathmin.harmonic.solve_prevertices_full", boom)
    rep = harmonic_bisection_search(new_bridge(2), 4,
                                    HmcParams(beta=0.7, solver="full"))
    # every post-midpoint round fell back; uniform tie bisects leftward
    assert rep.params["fallbacks"] == 3
    assert rep.params["midpoints"] == [0.5, 0.25, 0.125, 0.0625]


def test_report_tracks_best_queried_point():
    path = new_bridge(13)
    rep = harmonic_bisection_search(path, 12, HmcParams(beta=0.5, seed=1))
    times, values = path.sampled()
    assert rep.min_value == values.min()
    assert rep.argmin_t == times[np.argmin(values)]


def test_guided_search_beats_uniform_bisection_on_average():
    # exploratory comparison: mean found-minimum over 60 fresh bridges,
    # measure-sampled bisection vs uniformly random edge bisection
    def uniform_bisection(path, budget, rng):
        fn = as_oracle(path)
        times = [0.0, 1.0]
        values = [fn(0.0), fn(1.0)]

        def insert(t):
            i = bisect.bisect_left(times, t)
            times.insert(i, t)
            values.insert(i, fn(t))

        insert(0.5)
        for _ in range(budget - 1):
            k = int(rng.integers(0, len(times) - 1))
            insert(0.5 * (times[k] + times[k + 1]))
        return min(values)

    n, budget = 60, 33
    guided = np.array([
        harmonic_bisection_search(
            new_bridge(derive_seed(900, i)), budget,
            HmcParams(beta=1.0, strategy="sample_measure",
                      solver="perturbative", seed=derive_seed(901, i)),
        ).min_value
        for i in range(n)
    ])
    uniform = np.array([
        uniform_bisection(new_bridge(derive_seed(902, i)), budget,
                          make_rng(derive_seed(903, i)))
        for i in range(n)
    ])
    se = np.sqrt(guided.var(ddof=1) / n + uniform.var(ddof=1) / n)
    assert guided.mean() <= uniform.mean() + se


# ---------------------------------------------------------------------------
# Walker oracle


def test_oracle_matches_flat_two_edge_split():
    poly = flat_polygon([0.0, 0.5, 1.0])
    em = mc_hitting_oracle(poly, walkers=4000, dt=1e-4, seed=1)
    assert em.stderr is not None
    assert abs(em.weights.sum() - 1.0) < 1e-12
    assert np.all(np.abs(em.weights - 0.5) < 3.5 * em.stderr)


def test_oracle_matches_flat_uneven_widths():
    t = np.array([0.0, 0.2, 0.45, 0.7, 1.0])
    em = mc_hitting_oracle(flat_polygon(t), walkers=4000, dt=1e-4, seed=2)
    assert np.all(np.abs(em.weights - np.diff(t)) < 3.5 * em.stderr)


def test_oracle_matches_analytic_weights_on_a_walk():
    poly = make_bridge_walk(77, 4, beta=0.4)
    mc = mc_hitting_oracle(poly, walkers=6000, dt=1e-4, seed=3)
    an = edge_measures(poly, solver="full")
    assert np.all(np.abs(mc.weights - an.weights) < 4.0 * mc.stderr)


def test_oracle_is_deterministic_per_seed():
    poly = flat_polygon([0.0, 0.5, 1.0])
    a = mc_hitting_oracle(poly, walkers=500, dt=1e-3, seed=9)
    b = mc_hitting_oracle(poly, walkers=500, dt=1e-3, seed=9)
    assert np.array_equal(a.weights, b.weights)


# ---------------------------------------------------------------------------
# CSV output


def test_measures_csv_layout(tmp_path):
    em = EdgeMeasures(times=np.array([0.0, 0.4, 1.0]),
                      weights=np.array([0.25, 0.75]))
    out = tmp_path / "m.csv"
    save_measures_csv(em, str(out), extra_meta={"note": 1})
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["k", "t_left", "t_right", "weight", "stderr"]
    assert rows[1][0] == "1" and rows[2][0] == "2"
    assert float(rows[1][3]) == 0.25
    assert (tmp_path / "m.csv.meta.json").exists()


def test_measures_csv_appends_oracle_columns(tmp_path):
    em = EdgeMeasures(times=np.array([0.0, 0.4, 1.0]),
                      weights=np.array([0.25, 0.75]))
    mc = EdgeMeasures(times=em.times, weights=np.array([0.26, 0.74]),
                      stderr=np.array([0.01, 0.01]))
    out = tmp_path / "m.csv"
    save_measures_csv(em, str(out), oracle=mc)
    rows = list(csv.reader(out.open()))
    assert rows[0][-2:] == ["mc_weight", "mc_stderr"]
    assert float(rows[1][5]) == 0.26
    short = EdgeMeasures(times=np.array([0.0, 1.0]), weights=np.array([1.0]))
    with pytest.raises(ValueError):
        save_measures_csv(em, str(out), oracle=short)
