"""Command-line front end: ``lcu classify``, ``lcu simulate``, ``lcu experiment``.

Exit codes: 0 success, 1 invalid input or usage, 2 disconnected graph.
"""

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import analysis
from . import deterministic as det
from . import io
from .errors import DisconnectedGraph, LCUError
from .graph import (build_knn_graph, choose_labeled, diameter, gen_class_network,
                    smallest_connecting_k, validate_graph)
from .stochastic import stoch_run
from .unfolding import classify, unfold

log = logging.getLogger("lcu")

SUITES = ("equivalence", "timing", "scale", "classification")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _input_args(p):
    src = p.add_argument_group("input")
    src.add_argument("--points", help="CSV of feature rows (built into a kNN graph)")
    src.add_argument("--label-column", action="store_true",
                     help="last column of --points holds labels (0 = unlabeled)")
    src.add_argument("--edges", help="edge list file, one 'i j' pair per line")
    src.add_argument("--labels", help="CSV 'vertex,label' file")
    src.add_argument("--classes", type=int, default=None,
                     help="number of classes C (default: largest label)")
    knn = src.add_mutually_exclusive_group()
    knn.add_argument("--k", type=int, help="neighbors per point for the kNN graph")
    knn.add_argument("--auto-k", action="store_true",
                     help="smallest k <= 20 giving a connected graph (default for --points)")


def _system_args(p, tau_default=1000):
    s = p.add_argument_group("system")
    s.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="competition level in [0, 1] (default: %(default)s)")
    s.add_argument("--tau", type=int, default=tau_default,
                   help="number of iterations (default: %(default)s)")
    s.add_argument("--init", choices=("degree", "sources", "file"), default="degree",
                   help="initial population scheme (default: %(default)s)")
    s.add_argument("--init-file", help="CSV with one column (all classes) or C columns, one row per vertex")
    s.add_argument("--update", choices=("synchronous", "sequential"), default="synchronous",
                   help="class update order (default: %(default)s)")
    s.add_argument("--patience", type=int, default=None,
                   help="stop once the unfolding is unchanged for this many steps (default: off)")
    s.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")
    s.add_argument("--stochastic", action="store_true", help="run the particle simulation")
    s.add_argument("--particles", type=int, default=None,
                   help="initial particles per class for --stochastic (default: 100 * sum of degrees)")
    s.add_argument("--runs", type=int, default=10, help="stochastic runs to average (default: %(default)s)")
    s.add_argument("--out", default="lcu-out", help="output directory (default: %(default)s)")
    s.add_argument("--timings", action="store_true",
                   help="record wall-clock timings in the report (makes it non-reproducible)")


def build_parser():
    parser = _Parser(prog="lcu", description="Particle competition for edge domination on graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="unfold a labeled graph and classify unlabeled vertices")
    _input_args(p)
    _system_args(p)

    p = sub.add_parser("simulate", help="stochastic particle run, optionally compared to the deterministic one")
    _input_args(p)
    gen = p.add_argument_group("generated network (when no input files are given)")
    gen.add_argument("--generate", type=int, default=200, help="vertices of G(y, m, p) (default: %(default)s)")
    gen.add_argument("--m", type=int, default=3, help="edges drawn per vertex (default: %(default)s)")
    gen.add_argument("--p", type=float, default=0.05, help="cross-class weight (default: %(default)s)")
    gen.add_argument("--labeled", type=float, default=0.05, help="labeled fraction (default: %(default)s)")
    _system_args(p, tau_default=200)
    p.add_argument("--compare", action="store_true",
                   help="also run the deterministic system and print the domination correlation")

    p = sub.add_parser("experiment", help="reproduce a verification study")
    p.add_argument("suite", help="one of: " + ", ".join(SUITES))
    p.add_argument("--seed", type=int, default=0, help="master seed (default: %(default)s)")
    p.add_argument("--out", default="lcu-out", help="output directory (default: %(default)s)")
    p.add_argument("--networks", type=int, default=None, help="networks/graphs per condition")
    p.add_argument("--runs", type=int, default=None, help="stochastic runs or timing runs per point")
    p.add_argument("--tau", type=int, default=None, help="iterations per run")
    return parser


def _load_graph(args):
    if args.points:
        data = io.read_points(args.points, label_column=args.label_column)
        labels = data.labels
        if args.labels:
            labels = io.read_labels(args.labels, len(data), args.classes)
        if args.k:
            k, g = args.k, build_knn_graph(data, args.k)
        else:
            k, g = smallest_connecting_k(data)
            log.info("auto-k selected k=%d", k)
        return g.with_labels(labels, args.classes), k
    if args.edges:
        g = io.read_edge_list(args.edges)
        if not args.labels:
            raise LCUError("--edges requires --labels")
        return g.with_labels(io.read_labels(args.labels, g.num_vertices, args.classes), args.classes), None
    raise LCUError("provide --points or --edges")


def _init(args, g):
    if args.init != "file":
        return args.init
    if not args.init_file:
        raise LCUError("--init file requires --init-file")
    values = np.loadtxt(args.init_file, delimiter=",", ndmin=2)
    if values.shape[0] != g.num_vertices:
        raise LCUError(f"--init-file needs {g.num_vertices} rows, found {values.shape[0]}")
    return values.T if values.shape[1] > 1 else values[:, 0]


def _echo(args, **more):
    skip = {"verbose", "out"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    out.update(more)
    return out


def _write_unfolding(outdir, u):
    for c in range(1, u.num_classes + 1):
        io.write_edges(u.edges_of(c), os.path.join(outdir, f"unfolding_{c}.edges"))
    io.write_edges(u.unassigned, os.path.join(outdir, "unfolding_unassigned.edges"))


def _check_tau(g, tau):
    d = diameter(g)
    if tau < d:
        log.warning("tau=%d is below the network diameter %d; some edges may never be visited", tau, d)
    return d


def _evolve(args, g):
    """Run the requested system; return (state-like, per-iteration totals, extra report fields)."""
    if args.stochastic:
        particles = args.particles if args.particles is not None else 100 * int(g.degrees.sum())
        if particles < 1:
            raise LCUError("--particles must be positive")
        if args.runs < 1:
            raise LCUError("--runs must be positive")
        totals = []
        ens = stoch_run(g, particles, args.lam, args.tau, seed=args.seed, runs=args.runs,
                        callback=lambda e: totals.append(e.totals().mean(axis=0)))
        totals.insert(0, np.full(g.num_classes, float(particles)))
        return ens, np.array(totals), {"particles": particles}
    params = det.SystemParams(lam=args.lam, tau=args.tau, init=_init(args, g), update=args.update,
                              patience=args.patience)
    first = det.init_state(g, params)
    totals = [first.totals()]
    state = det.run(g, params, state=first, callback=lambda s: totals.append(s.totals()))
    return state, np.array(totals), {"iterations": state.t}


def cmd_classify(args):
    g, k = _load_graph(args)
    validate_graph(g)
    d = _check_tau(g, args.tau)
    os.makedirs(args.out, exist_ok=True)
    start = time.perf_counter()
    state, totals, extra = _evolve(args, g)
    u = unfold(g, state)
    pred = classify(g, u)
    elapsed = time.perf_counter() - start
    io.write_predictions(pred, os.path.join(args.out, "predictions.csv"))
    _write_unfolding(args.out, u)
    io.dump_domination(g, state, os.path.join(args.out, "domination.txt"))
    params = _echo(args, k=k, diameter=d, vertices=g.num_vertices, edges=g.num_edges,
                   classes=g.num_classes, **extra)
    timings = {"seconds": elapsed} if args.timings else None
    io.write_report(io.run_report(params, totals, u, pred, timings),
                    os.path.join(args.out, "report.json"))
    unlabeled = int((~g.labeled).sum())
    print(f"classified {unlabeled} unlabeled vertices; unfolding sizes {u.sizes().tolist()}; "
          f"{int(pred.overlapping[~g.labeled].sum())} overlapping; outputs in {args.out}")
    return 0


def cmd_simulate(args):
    if args.particles is not None and args.particles < 1:
        raise LCUError("--particles must be positive")
    if args.points or args.edges:
        g, _ = _load_graph(args)
    else:
        n = args.generate
        y = np.repeat([1, 2], [n // 2, n - n // 2])
        g = gen_class_network(y, args.m, args.p, seed=args.seed)
        g = g.with_labels(choose_labeled(y, args.labeled, seed=args.seed), num_classes=2)
    validate_graph(g)
    os.makedirs(args.out, exist_ok=True)
    args.stochastic = True
    ens, totals, extra = _evolve(args, g)
    u = unfold(g, ens)
    io.dump_domination(g, ens, os.path.join(args.out, "domination.txt"))
    _write_unfolding(args.out, u)
    io.write_edge_list(g, os.path.join(args.out, "graph.edges"))
    io.write_labels(g.labels, os.path.join(args.out, "labels.csv"))
    if args.compare:
        params = det.SystemParams(lam=args.lam, tau=args.tau, init="degree")
        ref = det.run(g, params)
        extra["correlation"] = analysis.domination_correlation(g, ref, ens)
        print(f"correlation: {extra['correlation']:.6f}")
    io.write_report(io.run_report(_echo(args, **{k: v for k, v in extra.items() if k != "correlation"}),
                                  totals, u, extra={"correlation": extra.get("correlation")}),
                    os.path.join(args.out, "report.json"))
    return 0


def cmd_experiment(args):
    if args.suite not in SUITES:
        raise LCUError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    os.makedirs(args.out, exist_ok=True)
    opts = {k: v for k, v in (("tau", args.tau),) if v is not None}
    if args.suite == "equivalence":
        if args.networks:
            opts["num_networks"] = args.networks
        if args.runs:
            opts["runs"] = args.runs
        report = analysis.equivalence_experiment(seed=args.seed, **opts)
        for lam, curve in report.summary.items():
            io.write_series_csv(os.path.join(args.out, f"correlation_lambda_{lam}.csv"),
                                curve["scale"], curve["mean"], curve["std"])
    elif args.suite == "timing":
        if args.runs:
            opts["runs"] = args.runs
        opts.pop("tau", None)
        report = analysis.timing_scan(seed=args.seed, **opts)
        for sweep in ("edges", "vertices"):
            rows = [c for c in report.conditions if c["sweep"] == sweep]
            io.write_series_csv(os.path.join(args.out, f"time_vs_{sweep}.csv"),
                                [r[sweep] for r in rows], [r["mean"] for r in rows],
                                [r["std"] for r in rows])
    elif args.suite == "scale":
        if args.networks:
            opts["num_graphs"] = args.networks
        report = analysis.scale_invariance_experiment(seed=args.seed, **opts)
        kappas = report.config["kappas"]
        worst = [max(c["max_relative_deviation"] for c in report.conditions if c["kappa"] == k)
                 for k in kappas]
        io.write_series_csv(os.path.join(args.out, "scale_deviation.csv"), kappas, worst,
                            [0.0] * len(kappas))
    else:
        if args.networks:
            opts["num_networks"] = args.networks
        report = analysis.classification_experiment(seed=args.seed, **opts)
    io.write_report(report.to_dict(), os.path.join(args.out, f"{args.suite}.json"))
    print(io.dumps_report(report.summary), end="")
    return 0


COMMANDS = {"classify": cmd_classify, "simulate": cmd_simulate, "experiment": cmd_experiment}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DisconnectedGraph as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LCUError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
