"""Experiment harness: stochastic/deterministic agreement, scale sweeps, timing."""

import platform
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import deterministic as det
from ._rng import make_rng, spawn_seeds
from .errors import UndefinedCorrelation
from .graph import (choose_labeled, gen_class_network, gen_random_graph, gen_torus_knot,
                    smallest_connecting_k)
from .stochastic import stoch_run
from .unfolding import edge_owner, edge_scores


@dataclass
class ExperimentReport:
    name: str
    config: dict
    conditions: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _metadata(start):
    return {
        "wall_seconds": round(time.perf_counter() - start, 3),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
    }


def _domination(x):
    return np.asarray(getattr(x, "domination", x), dtype=float)


def domination_correlation(g, a, b):
    """Pearson correlation of two cumulative-domination snapshots.

    Both inputs are ``(C, nnz)`` arrays or states with a ``domination``
    attribute. Values are symmetrized per undirected edge and concatenated
    over classes before correlating.
    """
    x = edge_scores(g, _domination(a)).ravel()
    y = edge_scores(g, _domination(b)).ravel()
    x = x - x.mean()
    y = y - y.mean()
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise UndefinedCorrelation("one of the domination snapshots has zero variance")
    return float(np.clip(np.dot(x / nx, y / ny), -1.0, 1.0))


def _two_class_network(n_vertices, m, p, labeled, seed):
    rng = make_rng(seed)
    y = np.repeat([1, 2], [n_vertices // 2, n_vertices - n_vertices // 2])
    g = gen_class_network(y, m, p, seed=rng)
    return g.with_labels(choose_labeled(y, labeled, seed=rng), num_classes=2), y


def equivalence_experiment(num_networks=10, lambdas=(0.0, 0.5, 1.0), scales=(1, 4, 16, 64),
                           runs=10, tau=200, n_vertices=200, m=3, p=0.05, labeled=0.05, seed=0):
    """Correlation between deterministic and seed-averaged stochastic domination.

    For each network, lambda and scale, the stochastic system starts with
    ``scale * deg(v)`` particles per class at every vertex and the
    deterministic one with ``deg(v)``; ``runs`` stochastic runs are averaged
    before correlating.
    """
    start = time.perf_counter()
    config = dict(num_networks=num_networks, lambdas=list(lambdas), scales=list(scales), runs=runs,
                  tau=tau, n_vertices=n_vertices, m=m, p=p, labeled=labeled, seed=seed)
    report = ExperimentReport("equivalence", config)
    net_seeds = spawn_seeds(seed, num_networks)
    report.seeds = net_seeds
    corr = np.empty((num_networks, len(lambdas), len(scales)))
    for a, ns in enumerate(net_seeds):
        g, _ = _two_class_network(n_vertices, m, p, labeled, ns)
        total = int(g.degrees.sum())
        run_seeds = spawn_seeds(ns, len(lambdas) * len(scales))
        for b, lam in enumerate(lambdas):
            d_state = det.run(g, det.SystemParams(lam=lam, tau=tau, init="degree"))
            for s, scale in enumerate(scales):
                rs = run_seeds[b * len(scales) + s]
                ens = stoch_run(g, scale * total, lam, tau, seed=rs, runs=runs)
                corr[a, b, s] = domination_correlation(g, d_state, ens)
                report.conditions.append(dict(network=a, network_seed=ns, lam=lam, scale=scale,
                                              stochastic_seed=rs, correlation=corr[a, b, s]))
    curves = {}
    for b, lam in enumerate(lambdas):
        mean = corr[:, b, :].mean(axis=0)
        trend = stats.spearmanr(scales, mean).statistic if len(scales) > 1 else float("nan")
        curves[str(lam)] = dict(scale=list(scales), mean=mean.tolist(),
                                std=corr[:, b, :].std(axis=0, ddof=1).tolist() if num_networks > 1
                                else [0.0] * len(scales),
                                n=num_networks, spearman=float(trend))
    report.summary = curves
    report.metadata = _metadata(start)
    return report


def _relative_deviation(scaled_value, base_value, kappa):
    expect = kappa * base_value
    diff = np.abs(scaled_value - expect)
    denom = np.abs(expect)
    out = np.zeros_like(diff)
    nz = denom > 0
    out[nz] = diff[nz] / denom[nz]
    out[~nz & (diff > 0)] = np.inf
    return float(out.max()) if out.size else 0.0


def scale_test_graphs(num_graphs=50, seed=0):
    """Random 100-200 vertex test graphs, alternating kNN (torus knot) and G(y, 3, 0.05)."""
    graphs = []
    for i, s in enumerate(spawn_seeds(seed, num_graphs)):
        rng = make_rng(s)
        n = int(rng.integers(100, 201))
        if i % 2 == 0:
            classes = int(rng.integers(2, 5))
            data = gen_torus_knot(n, classes, 0.25, seed=rng)
            _, g = smallest_connecting_k(data)
            y = data.labels
        else:
            classes = 2
            g, y = _two_class_network(n, 3, 0.05, 0.1, rng)
        g = g.with_labels(choose_labeled(y, 0.1, seed=rng), num_classes=classes)
        graphs.append((s, g))
    return graphs


def scale_invariance_experiment(num_graphs=50, kappas=(0.5, 2.0, 10.0), lambdas=(0.0, 0.5, 1.0),
                                tau=50, seed=0):
    """Check that multiplying the initial population scales the whole trajectory.

    Also records the worst deviation of the subordination sum from ``C - 1``
    seen on any edge at any step of the unscaled runs.
    """
    start = time.perf_counter()
    config = dict(num_graphs=num_graphs, kappas=list(kappas), lambdas=list(lambdas), tau=tau, seed=seed)
    report = ExperimentReport("scale", config)
    worst_rel, worst_sigma, all_same = 0.0, 0.0, True
    for s, g in scale_test_graphs(num_graphs, seed):
        report.seeds.append(s)
        C = g.num_classes
        for lam in lambdas:
            params = det.SystemParams(lam=lam, tau=tau, init="degree")
            sigma_dev = [0.0]

            def watch(state):
                total = det.subordination_matrix(g, state.flow).sum(axis=0)
                sigma_dev[0] = max(sigma_dev[0], float(np.abs(total - (C - 1)).max()))

            base = det.run(g, params, callback=watch)
            base_owner = edge_owner(g, base.domination)
            for kappa in kappas:
                other = det.run(g, det.scaled(params, kappa, g))
                rel = max(_relative_deviation(other.population, base.population, kappa),
                          _relative_deviation(other.flow, base.flow, kappa),
                          _relative_deviation(other.domination, base.domination, kappa))
                same = bool(np.array_equal(edge_owner(g, other.domination), base_owner))
                worst_rel = max(worst_rel, rel)
                all_same &= same
                report.conditions.append(dict(graph_seed=s, vertices=g.num_vertices,
                                              edges=g.num_edges, classes=C, lam=lam, kappa=kappa,
                                              max_relative_deviation=rel, same_unfolding=same))
            worst_sigma = max(worst_sigma, sigma_dev[0])
    report.summary = dict(max_relative_deviation=worst_rel, unfoldings_identical=all_same,
                          max_sigma_sum_deviation=worst_sigma, runs=len(report.conditions))
    report.metadata = _metadata(start)
    return report


def time_steps(g, lam=1.0, iterations=30):
    """Wall time of each of ``iterations`` steps after one untimed warm-up step."""
    params = det.SystemParams(lam=lam, tau=iterations, init="degree")
    kernel = det._Kernel(g)
    state = det.step(g, det.init_state(g, params), params, kernel)
    out = np.empty(iterations)
    for i in range(iterations):
        t0 = time.perf_counter()
        state = det.step(g, state, params, kernel)
        out[i] = time.perf_counter() - t0
    return out


def _loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def timing_scan(vertex_counts=(25_000, 50_000, 100_000, 200_000, 400_000),
                edge_counts=(20_000, 40_000, 80_000, 160_000, 320_000), seed=0,
                fixed_vertices=2_000, fixed_edges=400_000, iterations=30, runs=10, lam=1.0):
    """Per-iteration step time versus |E| at fixed |V| and versus |V| at fixed |E|."""
    start = time.perf_counter()
    config = dict(vertex_counts=list(vertex_counts), edge_counts=list(edge_counts), seed=seed,
                  fixed_vertices=fixed_vertices, fixed_edges=fixed_edges, iterations=iterations,
                  runs=runs, lam=lam)
    report = ExperimentReport("timing", config)
    sweeps = {"edges": [(fixed_vertices, e) for e in edge_counts],
              "vertices": [(v, fixed_edges) for v in vertex_counts]}
    seeds = iter(spawn_seeds(seed, runs * (len(edge_counts) + len(vertex_counts))))
    for sweep, sizes in sweeps.items():
        means = []
        for nv, ne in sizes:
            samples = []
            for _ in range(runs):
                s = next(seeds)
                report.seeds.append(s)
                g = gen_random_graph(nv, ne, seed=s)
                samples.append(time_steps(g, lam, iterations))
            samples = np.concatenate(samples)
            means.append(samples.mean())
            report.conditions.append(dict(sweep=sweep, vertices=nv, edges=ne, mean=float(samples.mean()),
                                          std=float(samples.std(ddof=1)), n=int(samples.size)))
        x = [e for _, e in sizes] if sweep == "edges" else [v for v, _ in sizes]
        report.summary[f"slope_vs_{sweep}"] = _loglog_slope(x, means) if len(x) > 1 else float("nan")
    report.metadata = _metadata(start)
    return report


def classification_experiment(num_networks=10, n_vertices=200, labeled=0.05, lam=1.0, tau=500,
                              m=3, p=0.05, seed=0):
    """Mean test error of the full pipeline on ``G(y, m, p)`` networks."""
    from .unfolding import classify, error_rate, unfold

    start = time.perf_counter()
    config = dict(num_networks=num_networks, n_vertices=n_vertices, labeled=labeled, lam=lam,
                  tau=tau, m=m, p=p, seed=seed)
    report = ExperimentReport("classification", config)
    errors = []
    for s in spawn_seeds(seed, num_networks):
        g, y = _two_class_network(n_vertices, m, p, labeled, s)
        state = det.run(g, det.SystemParams(lam=lam, tau=tau))
        err = error_rate(classify(g, unfold(g, state)), y, g.labeled)
        errors.append(err)
        report.seeds.append(s)
        report.conditions.append(dict(seed=s, error=err))
    report.summary = dict(mean_error=float(np.mean(errors)), std_error=float(np.std(errors, ddof=1))
                          if len(errors) > 1 else 0.0, n=len(errors))
    report.metadata = _metadata(start)
    return report
