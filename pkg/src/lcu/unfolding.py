"""Per-class unfoldings of the network and vertex classification.

An undirected edge belongs to the unfolding of class ``c`` when the two-way
cumulative domination of ``c`` on it strictly exceeds that of every other
class. Ties (within a relative tolerance) and never-visited edges stay
unassigned, so the class edge sets are disjoint.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

RTOL = 1e-12


def edge_scores(g, domination):
    """``(C, m)`` two-way cumulative domination per undirected edge."""
    domination = np.asarray(domination, dtype=float)
    k = g.upper
    return domination[:, k] + domination[:, g.reverse[k]]


def edge_owner(g, domination, rtol=RTOL):
    """Class id dominating each undirected edge, ``0`` for ties and unvisited edges."""
    scores = edge_scores(g, domination)
    C, m = scores.shape
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    best = np.argmax(scores, axis=0)
    top = scores[best, np.arange(m)]
    if C > 1:
        rest = scores.copy()
        rest[best, np.arange(m)] = -np.inf
        second = rest.max(axis=0)
        clear = top - second > rtol * np.abs(top)
    else:
        clear = np.ones(m, dtype=bool)
    return np.where(clear & (top > 0), best + 1, 0).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Unfolding:
    edges: np.ndarray  # (m, 2), i < j
    owner: np.ndarray  # (m,), 0 = unassigned
    num_classes: int

    def edges_of(self, c):
        return self.edges[self.owner == c]

    @property
    def unassigned(self):
        return self.edges[self.owner == 0]

    def sizes(self):
        """Edge count of each class unfolding (index ``c - 1``)."""
        return np.bincount(self.owner, minlength=self.num_classes + 1)[1:]

    def edge_sets(self):
        return {c: {tuple(map(int, e)) for e in self.edges_of(c)}
                for c in range(1, self.num_classes + 1)}


def unfold(g, state, rtol=RTOL):
    """Unfolding of ``g`` from any state exposing a ``domination`` array."""
    return Unfolding(g.edges, edge_owner(g, state.domination, rtol), g.num_classes)


@dataclass(frozen=True, eq=False)
class Prediction:
    labels: np.ndarray  # (V,), 0 when undecidable
    scores: np.ndarray  # (V, C) edge counts at the depth used
    depth: np.ndarray  # (V,) BFS depth used; 0 for labeled vertices
    overlapping: np.ndarray  # (V,) bool, >= 2 classes present at depth 1

    @property
    def num_classes(self):
        return self.scores.shape[1]


def _owner_onehot(u):
    m = u.owner.shape[0]
    hit = np.flatnonzero(u.owner > 0)
    return sparse.csr_matrix((np.ones(hit.shape[0]), (hit, u.owner[hit] - 1)),
                             shape=(m, u.num_classes))


def _depth_one_scores(g, u):
    n = g.num_vertices
    ball = g.adjacency() + sparse.identity(n, format="csr")
    incidence = sparse.csr_matrix((np.ones(g.nnz), (g.row, g.edge_id)), shape=(n, g.num_edges))
    touch = (ball @ incidence).astype(bool).astype(float)
    return np.rint((touch @ _owner_onehot(u)).toarray()).astype(np.int64)


def overlap_profile(g, u, i):
    """Edges of each class unfolding touching the closed neighborhood of ``i``."""
    ball = np.concatenate([[i], g.neighbors(i)])
    eids = np.unique(np.concatenate([g.edge_id[g.indptr[v]:g.indptr[v + 1]] for v in ball]))
    owners = u.owner[eids]
    return np.bincount(owners, minlength=u.num_classes + 1)[1:]


def classify(g, u):
    """Label every unlabeled vertex by the unfolding owning most nearby edges.

    Scores count the edges of each class unfolding with at least one endpoint
    within BFS distance ``d`` of the vertex, starting at ``d = 1``. When every
    score is zero the ball grows until some edge is dominated or the whole
    component is covered (the vertex then gets class 0). Ties go to the lowest
    class id. Labeled vertices keep their labels.
    """
    C = u.num_classes
    scores = _depth_one_scores(g, u)
    overlapping = np.count_nonzero(scores, axis=1) >= 2
    labels = g.labels.copy()
    depth = np.where(g.labeled, 0, 1)
    unlabeled = np.flatnonzero(~g.labeled)
    empty = unlabeled[scores[unlabeled].sum(axis=1) == 0]
    if empty.size:
        dist = csgraph.shortest_path(g.adjacency(), directed=False, unweighted=True, indices=empty)
        a, b = u.edges[:, 0], u.edges[:, 1]
        for row, i in enumerate(empty):
            reach = np.minimum(dist[row, a], dist[row, b])
            finite = np.isfinite(dist[row])
            ecc = int(dist[row, finite].max())
            for d in range(2, ecc + 1):
                counts = np.bincount(u.owner[reach <= d], minlength=C + 1)[1:]
                depth[i] = d
                if counts.any():
                    scores[i] = counts
                    break
    decided = scores[unlabeled].sum(axis=1) > 0
    labels[unlabeled] = np.where(decided, np.argmax(scores[unlabeled], axis=1) + 1, 0)
    return Prediction(labels, scores, depth, overlapping)


def error_rate(pred, truth, labeled_mask):
    """Fraction of unlabeled vertices whose predicted label differs from ``truth``."""
    mask = ~np.asarray(labeled_mask, dtype=bool)
    return float(np.mean(pred.labels[mask] != np.asarray(truth)[mask]))
