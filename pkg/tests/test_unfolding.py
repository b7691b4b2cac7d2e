import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcu import Graph, SystemParams, classify, init_state, overlap_profile, run, step, unfold
from lcu.unfolding import Unfolding, edge_owner, edge_scores, error_rate

from strategies import graphs, lams

SRC = SystemParams(lam=1.0, tau=1, init="sources")


def edge_dom(g, per_edge):
    """``(C, nnz)`` domination putting ``per_edge[c, e]`` on the i<j direction of edge e."""
    per_edge = np.asarray(per_edge, dtype=float)
    dom = np.zeros((per_edge.shape[0], g.nnz))
    dom[:, g.upper] = per_edge
    return dom


def test_initial_state_all_unassigned(path3):
    u = unfold(path3, init_state(path3, SystemParams()))
    assert u.owner.tolist() == [0, 0]
    assert u.unassigned.tolist() == [[0, 1], [1, 2]]
    assert overlap_profile(path3, u, 1).tolist() == [0, 0]


def test_path_unfolding(path3):
    s = step(path3, init_state(path3, SRC), SRC)
    u = unfold(path3, s)
    assert u.edge_sets() == {1: {(0, 1)}, 2: {(1, 2)}}
    assert u.sizes().tolist() == [1, 1]


def test_path_classify_tie_to_lowest_class(path3):
    s = step(path3, init_state(path3, SRC), SRC)
    pred = classify(path3, unfold(path3, s))
    assert pred.labels.tolist() == [1, 1, 2]
    assert pred.scores[1].tolist() == [1, 1]
    assert bool(pred.overlapping[1])
    assert pred.depth.tolist() == [0, 1, 0]
    assert overlap_profile(path3, unfold(path3, s), 1).tolist() == [1, 1]


def test_exact_tie_unassigned(path3):
    dom = edge_dom(path3, [[2.0, 1.0], [2.0, 0.0]])
    assert edge_owner(path3, dom).tolist() == [0, 1]


def test_relative_tolerance(path3):
    a = 1.0
    dom = edge_dom(path3, [[a, 1.0], [a * (1 + 1e-14), 0.0]])
    assert edge_owner(path3, dom)[0] == 0
    dom = edge_dom(path3, [[a, 1.0], [a * (1 + 1e-9), 0.0]])
    assert edge_owner(path3, dom)[0] == 2


def test_both_directions_count():
    g = Graph.from_edges(2, [(0, 1)], labels=[1, 2])
    dom = np.zeros((2, 2))
    dom[0, g.position(0, 1)] = 1.0
    dom[1, g.position(1, 0)] = 0.6
    dom[1, g.position(0, 1)] = 0.6
    assert edge_scores(g, dom).tolist() == [[1.0], [1.2]]
    assert edge_owner(g, dom).tolist() == [2]


def test_classify_single_class_region():
    # star around 0 whose edges all belong to class 3
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)], labels=[0, 3, 1, 2, 0], num_classes=3)
    u = Unfolding(g.edges, np.array([3, 3, 3, 3]), 3)
    pred = classify(g, u)
    assert pred.labels[0] == 3 and pred.labels[4] == 3
    assert overlap_profile(g, u, 0).tolist() == [0, 0, 4]


def test_classify_expands_ball():
    # long path; only the far edge is dominated
    n = 7
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], labels=[0, 0, 0, 0, 0, 1, 2])
    owner = np.zeros(n - 1, dtype=int)
    owner[-1] = 2
    pred = classify(g, Unfolding(g.edges, owner, 2))
    assert pred.labels[0] == 2
    assert pred.depth[0] == 5  # vertex 5 is the nearest endpoint of edge (5, 6)
    assert pred.depth[4] == 1


def test_classify_no_domination_gives_zero(path3):
    pred = classify(path3, unfold(path3, init_state(path3, SystemParams())))
    assert pred.labels.tolist() == [1, 0, 2]
    # the depth-1 ball of the middle vertex already covers the whole graph
    assert pred.depth[1] == 1
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)], labels=[1, 0, 0, 2])
    pred = classify(g, unfold(g, init_state(g, SystemParams())))
    assert pred.labels.tolist() == [1, 0, 0, 2] and pred.depth.tolist() == [0, 2, 2, 0]


@settings(max_examples=40, deadline=None)
@given(g=graphs, lam=lams, tau=st.integers(0, 15), kappa=st.floats(0.01, 100))
def test_partition_and_scale_invariance(g, lam, tau, kappa):
    s = run(g, SystemParams(lam=lam, tau=tau))
    u = unfold(g, s)
    sets = u.edge_sets()
    all_edges = {tuple(map(int, e)) for e in g.edges}
    union = set().union(*sets.values()) | {tuple(map(int, e)) for e in u.unassigned}
    assert union == all_edges
    assert sum(len(v) for v in sets.values()) + len(u.unassigned) == g.num_edges
    np.testing.assert_array_equal(edge_owner(g, kappa * s.domination), u.owner)


@settings(max_examples=40, deadline=None)
@given(g=graphs, lam=lams, seed=st.integers(0, 1000))
def test_classify_invariants(g, lam, seed):
    u = unfold(g, run(g, SystemParams(lam=lam, tau=10)))
    pred = classify(g, u)
    assert np.array_equal(pred.labels[g.labeled], g.labels[g.labeled])
    free = np.flatnonzero(~g.labeled)
    for i in free:
        sc = pred.scores[i]
        if sc.sum() == 0:
            assert pred.labels[i] == 0
        else:
            assert pred.labels[i] == int(np.argmax(sc)) + 1
            assert sc[pred.labels[i] - 1] == sc.max()
            assert not np.any(sc[:pred.labels[i] - 1] == sc.max())
        if pred.depth[i] == 1:
            assert np.array_equal(overlap_profile(g, u, i), sc)
    # relabeling vertices permutes the prediction (order independence)
    perm = np.random.default_rng(seed).permutation(g.num_vertices)
    inv = np.argsort(perm)
    h = Graph.from_edges(g.num_vertices, inv[g.edges], labels=g.labels[perm], num_classes=g.num_classes)
    owner_of = {frozenset(map(int, e)): o for e, o in zip(g.edges, u.owner)}
    owner_h = np.array([owner_of[frozenset(map(int, perm[e]))] for e in h.edges], dtype=int)
    ph = classify(h, Unfolding(h.edges, owner_h, g.num_classes))
    np.testing.assert_array_equal(ph.labels, pred.labels[perm])


def test_dominance_sanity():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)], labels=[1, 0, 0, 2])
    dom = edge_dom(g, [[1.0, 1.0, 2.0], [1.0, 0.5, 2.0]])
    owner = edge_owner(g, dom)
    assert owner.tolist() == [0, 1, 0]


def test_error_rate():
    class P:
        labels = np.array([1, 1, 2, 2])
    assert error_rate(P, [1, 2, 2, 1], [True, False, False, False]) == pytest.approx(2 / 3)
