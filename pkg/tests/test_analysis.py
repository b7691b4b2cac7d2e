import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcu import SystemParams, domination_correlation, run
from lcu.analysis import (classification_experiment, equivalence_experiment, scale_invariance_experiment,
                          time_steps, timing_scan)
from lcu.errors import UndefinedCorrelation
from lcu.graph import gen_random_graph

from strategies import graphs


def busy_state(seed=0):
    g = gen_random_graph(60, 150, seed=seed, num_classes=3)
    return g, run(g, SystemParams(tau=20))


def test_correlation_of_multiple_is_one():
    g, s = busy_state()
    assert domination_correlation(g, s, 3.0 * s.domination) == pytest.approx(1.0, abs=1e-12)


def test_correlation_of_negated_is_minus_one():
    g, s = busy_state()
    # a constant added to every directed entry shifts each symmetrized value equally
    assert domination_correlation(g, s, 5.0 - s.domination) == pytest.approx(-1.0, abs=1e-12)


def test_correlation_zero_variance():
    g, s = busy_state()
    with pytest.raises(UndefinedCorrelation):
        domination_correlation(g, s, np.zeros_like(s.domination))


@settings(max_examples=25, deadline=None)
@given(g=graphs, seed=st.integers(0, 1000), a=st.floats(0.1, 10), b=st.floats(0.1, 10))
def test_correlation_symmetric_and_scale_free(g, seed, a, b):
    x = run(g, SystemParams(tau=6)).domination
    y = x * np.random.default_rng(seed).uniform(0.5, 1.5, size=x.shape)
    try:
        r = domination_correlation(g, x, y)
    except UndefinedCorrelation:
        return
    assert -1.0 <= r <= 1.0
    assert domination_correlation(g, y, x) == pytest.approx(r, abs=1e-12)
    assert domination_correlation(g, a * x, b * y) == pytest.approx(r, abs=1e-12)


def test_equivalence_small():
    rep = equivalence_experiment(num_networks=2, lambdas=(0.0, 1.0), scales=(1, 16), runs=3, tau=40,
                                 n_vertices=60, seed=1)
    assert len(rep.conditions) == 2 * 2 * 2
    zero = rep.summary["0.0"]
    assert zero["n"] == 2 and len(zero["std"]) == 2
    assert zero["mean"][1] > zero["mean"][0] and zero["mean"][1] > 0.99
    again = equivalence_experiment(num_networks=2, lambdas=(0.0, 1.0), scales=(1, 16), runs=3, tau=40,
                                   n_vertices=60, seed=1)
    assert again.conditions == rep.conditions and again.seeds == rep.seeds
    assert "wall_seconds" in rep.metadata


def test_equivalence_lambda_zero_small_scale():
    # default network size, smallest particle scale
    rep = equivalence_experiment(num_networks=2, lambdas=(0.0,), scales=(1,), seed=5)
    assert all(c["correlation"] > 0.99 for c in rep.conditions)


def test_scale_invariance_small():
    rep = scale_invariance_experiment(num_graphs=4, tau=15, seed=3)
    assert rep.summary["max_relative_deviation"] < 1e-9
    assert rep.summary["unfoldings_identical"]
    assert rep.summary["max_sigma_sum_deviation"] < 1e-12
    assert rep.summary["runs"] == 4 * 3 * 3


def test_classification_small():
    rep = classification_experiment(num_networks=2, tau=100, seed=0)
    assert rep.summary["n"] == 2 and 0.0 <= rep.summary["mean_error"] <= 0.25


def test_timing_doubling_edges():
    small = gen_random_graph(2000, 40_000, seed=0)
    large = gen_random_graph(2000, 80_000, seed=1)
    t_small = np.median(time_steps(small, iterations=15))
    t_large = np.median(time_steps(large, iterations=15))
    assert t_large / t_small < 3


def test_timing_lambda_independent():
    g = gen_random_graph(2000, 100_000, seed=2)
    a = np.median(np.concatenate([time_steps(g, 0.0, 10) for _ in range(3)]))
    b = np.median(np.concatenate([time_steps(g, 1.0, 10) for _ in range(3)]))
    assert abs(a / b - 1) < 0.2


def test_timing_scan_report():
    rep = timing_scan(vertex_counts=(500, 1000), edge_counts=(1000, 2000), fixed_vertices=300,
                      fixed_edges=3000, iterations=3, runs=2)
    assert set(rep.summary) == {"slope_vs_edges", "slope_vs_vertices"}
    assert len(rep.conditions) == 4 and all(c["n"] == 6 for c in rep.conditions)
    assert len(rep.seeds) == 8
