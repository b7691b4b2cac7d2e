"""Labeled component unfolding: particle competition for edge domination.

Typical use::

    from lcu import Graph, SystemParams, run, unfold, classify

    g = Graph.from_edges(3, [(0, 1), (1, 2)], labels=[1, 0, 2])
    state = run(g, SystemParams(lam=1.0, tau=10))
    pred = classify(g, unfold(g, state))
"""

from .analysis import (ExperimentReport, domination_correlation, equivalence_experiment,
                       scale_invariance_experiment, timing_scan)
from .deterministic import (SystemParams, SystemState, generation_vector, init_state, run, step,
                            subordination, transition_matrix)
from .errors import (DisconnectedGraph, GenerationFailed, GraphError, InvalidParameter, LCUError,
                     MissingClass, ParseError, UndefinedCorrelation)
from .graph import (Dataset, Graph, build_knn_graph, choose_labeled, diameter, gen_class_network,
                    gen_random_graph, gen_torus_knot, gen_two_gaussians, validate_graph)
from .stochastic import ParticleEnsemble, init_particles, stoch_run, stoch_step
from .unfolding import Prediction, Unfolding, classify, overlap_profile, unfold

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DisconnectedGraph",
    "ExperimentReport",
    "GenerationFailed",
    "Graph",
    "GraphError",
    "InvalidParameter",
    "LCUError",
    "MissingClass",
    "ParseError",
    "ParticleEnsemble",
    "Prediction",
    "SystemParams",
    "SystemState",
    "UndefinedCorrelation",
    "Unfolding",
    "build_knn_graph",
    "choose_labeled",
    "classify",
    "diameter",
    "domination_correlation",
    "equivalence_experiment",
    "gen_class_network",
    "gen_random_graph",
    "gen_torus_knot",
    "gen_two_gaussians",
    "generation_vector",
    "init_particles",
    "init_state",
    "overlap_profile",
    "run",
    "scale_invariance_experiment",
    "step",
    "stoch_run",
    "stoch_step",
    "subordination",
    "timing_scan",
    "transition_matrix",
    "unfold",
    "validate_graph",
]
