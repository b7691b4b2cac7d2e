"""Sparse labeled graphs, kNN construction and synthetic generators.

A :class:`Graph` stores a simple undirected graph in CSR form together with a
per-vertex label vector (``0`` marks an unlabeled vertex, ``1..C`` a class).
All directed quantities of the particle system (flows, domination) are stored
as flat arrays aligned with the CSR entries, so position ``k`` refers to the
directed edge ``row[k] -> indices[k]``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ._rng import make_rng
from .errors import DisconnectedGraph, GenerationFailed, GraphError, InvalidParameter, MissingClass


@dataclass(frozen=True, eq=False)
class Graph:
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    num_classes: int = field(default=0)

    @classmethod
    def from_edges(cls, num_vertices, edges, labels=None, num_classes=None):
        """Build a graph from an iterable of ``(i, j)`` pairs.

        Pairs are symmetrized and deduplicated. Self-loops raise
        :class:`GraphError`.
        """
        n = int(num_vertices)
        if n < 1:
            raise InvalidParameter("a graph needs at least one vertex")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphError(f"edge endpoint out of range [0, {n})")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            v = int(e[loops][0, 0])
            raise GraphError(f"self-loop at vertex {v}")
        both = np.concatenate([e, e[:, ::-1]])
        keys = np.unique(both[:, 0] * n + both[:, 1])
        rows, cols = np.divmod(keys, n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        if labels is None:
            labels = np.zeros(n, dtype=np.int64)
        return cls(indptr, cols.astype(np.int64), np.asarray(labels, dtype=np.int64),
                   _infer_classes(labels, num_classes))

    @classmethod
    def from_adjacency(cls, adjacency, labels=None, num_classes=None):
        a = sparse.coo_matrix(adjacency)
        keep = a.data != 0
        return cls.from_edges(a.shape[0], np.column_stack([a.row[keep], a.col[keep]]),
                              labels, num_classes)

    def with_labels(self, labels, num_classes=None):
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (self.num_vertices,):
            raise InvalidParameter(
                f"expected {self.num_vertices} labels, got {labels.shape[0]}")
        return Graph(self.indptr, self.indices, labels, _infer_classes(labels, num_classes))

    @property
    def num_vertices(self):
        return self.indptr.shape[0] - 1

    @property
    def nnz(self):
        return self.indices.shape[0]

    @property
    def num_edges(self):
        return self.nnz // 2

    @cached_property
    def degrees(self):
        return np.diff(self.indptr)

    @cached_property
    def row(self):
        """Source vertex of every CSR entry."""
        return np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees)

    @cached_property
    def reverse(self):
        """CSR position of the opposite direction of every entry."""
        n = self.num_vertices
        keys = self.row * n + self.indices
        return np.searchsorted(keys, self.indices * n + self.row)

    @cached_property
    def upper(self):
        """CSR positions ``k`` with ``row[k] < indices[k]``; one per undirected edge."""
        return np.flatnonzero(self.row < self.indices)

    @cached_property
    def edges(self):
        """Undirected edges as an ``(m, 2)`` array, ``i < j``, lexicographically sorted."""
        k = self.upper
        return np.column_stack([self.row[k], self.indices[k]])

    @cached_property
    def edge_id(self):
        """Undirected edge index of every CSR entry."""
        eid = np.empty(self.nnz, dtype=np.int64)
        eid[self.upper] = np.arange(self.upper.shape[0])
        lower = np.flatnonzero(self.row > self.indices)
        eid[lower] = eid[self.reverse[lower]]
        return eid

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def position(self, i, j):
        """CSR position of the directed edge ``i -> j``; ``KeyError`` if absent."""
        nb = self.neighbors(i)
        p = int(np.searchsorted(nb, j))
        if p >= nb.shape[0] or nb[p] != j:
            raise KeyError(f"no edge {i}-{j}")
        return int(self.indptr[i]) + p

    def adjacency(self):
        n = self.num_vertices
        return sparse.csr_matrix((np.ones(self.nnz), self.indices, self.indptr), shape=(n, n))

    def sources(self, c):
        return np.flatnonzero(self.labels == c)

    @property
    def labeled(self):
        return self.labels > 0

    def __repr__(self):
        return (f"Graph(num_vertices={self.num_vertices}, num_edges={self.num_edges}, "
                f"num_classes={self.num_classes}, labeled={int(self.labeled.sum())})")


def _infer_classes(labels, num_classes):
    if num_classes is not None:
        return int(num_classes)
    if labels is None:
        return 0
    labels = np.asarray(labels)
    return int(labels.max()) if labels.size else 0


@dataclass(frozen=True, eq=False)
class Dataset:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise InvalidParameter("points must be an (n, D) array with D >= 1")
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.shape != (pts.shape[0],):
            raise InvalidParameter("one label per point is required")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    def __len__(self):
        return self.points.shape[0]


def validate_graph(g):
    """Check every structural requirement of the particle system.

    Raises the first violation found, in this order: CSR structure, simple
    graph (sorted, no duplicates, no self-loops), symmetry, label range,
    connectivity, presence of every class. Returns ``g`` otherwise.
    """
    n = g.num_vertices
    if g.indptr[0] != 0 or np.any(np.diff(g.indptr) < 0) or g.indptr[-1] != g.nnz:
        raise GraphError("malformed CSR index pointer")
    if g.nnz and (g.indices.min() < 0 or g.indices.max() >= n):
        raise GraphError("neighbor index out of range")
    loops = g.row == g.indices
    if loops.any():
        raise GraphError(f"self-loop at vertex {int(g.row[loops][0])}")
    keys = g.row * n + g.indices
    if np.any(np.diff(keys) <= 0):
        raise GraphError("neighbor lists must be sorted and free of duplicates")
    rev = g.reverse
    if np.any(rev >= g.nnz) or np.any(keys[np.minimum(rev, g.nnz - 1)] != g.indices * n + g.row):
        raise GraphError("adjacency is not symmetric")
    if g.labels.shape != (n,):
        raise GraphError("label vector length differs from the vertex count")
    if np.any(g.labels < 0) or np.any(g.labels > g.num_classes):
        raise GraphError(f"labels must lie in 0..{g.num_classes}")
    ncomp, _ = csgraph.connected_components(g.adjacency(), directed=False)
    if ncomp > 1:
        raise DisconnectedGraph(
            f"graph has {ncomp} connected components; "
            "increase k (use the smallest k that yields a connected network)")
    if g.num_classes < 1:
        raise MissingClass([1])
    present = np.bincount(g.labels, minlength=g.num_classes + 1)[1:]
    if np.any(present == 0):
        raise MissingClass(np.flatnonzero(present == 0) + 1)
    return g


def is_connected(g):
    return csgraph.connected_components(g.adjacency(), directed=False)[0] == 1


def diameter(g):
    """Exact unweighted diameter by breadth-first search from every vertex."""
    dist = csgraph.shortest_path(g.adjacency(), directed=False, unweighted=True)
    if np.isinf(dist).any():
        raise DisconnectedGraph("diameter is undefined on a disconnected graph")
    return int(dist.max())


def _knn_indices(points, k, chunk_bytes=64 * 2**20):
    n, d = points.shape
    out = np.empty((n, k), dtype=np.int64)
    rows = max(1, chunk_bytes // (8 * n * d))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        diff = points[start:stop, None, :] - points[None, :, :]
        dist = np.einsum("ijk,ijk->ij", diff, diff)
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stable sort: equal distances keep ascending vertex order
        out[start:stop] = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return out


def build_knn_graph(data, k):
    """Symmetric (union) k-nearest-neighbor graph under Euclidean distance."""
    n = len(data)
    if k < 1 or k >= n:
        raise InvalidParameter(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    nn = _knn_indices(data.points, int(k))
    src = np.repeat(np.arange(n), k)
    return Graph.from_edges(n, np.column_stack([src, nn.ravel()]), data.labels,
                            num_classes=int(data.labels.max()) if n else 0)


def smallest_connecting_k(data, k_max=20):
    """Return ``(k, graph)`` for the smallest k in ``1..k_max`` giving a connected graph."""
    for k in range(1, min(k_max, len(data) - 1) + 1):
        g = build_knn_graph(data, k)
        if is_connected(g):
            return k, g
    raise DisconnectedGraph(f"no k <= {k_max} yields a connected kNN graph")


def gen_class_network(y, m, p, seed=None, max_tries=100):
    """Random network ``G(y, m, p)`` with class-biased preferential attachment.

    Each vertex ``i`` draws ``m`` targets with replacement, with probability
    proportional to ``w(i, j) * (deg(j) + 1)``, where ``w`` is ``1 - p`` for
    same-class pairs and ``p`` otherwise. Repeated draws collapse into one
    edge. The whole construction is repeated until the result is connected.
    """
    y = np.asarray(y, dtype=np.int64)
    n = y.shape[0]
    if n < 2:
        raise InvalidParameter("G(y, m, p) needs at least two vertices")
    if m < 1:
        raise InvalidParameter("m must be positive")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter("p must lie in [0, 1]")
    classes = np.unique(y)
    if p == 0.0 and classes.shape[0] > 1:
        raise GenerationFailed("p = 0 never links different classes; the network is disconnected")
    rng = make_rng(seed)
    same = y[:, None] == y[None, :]
    weight = np.where(same, 1.0 - p, p)
    for _ in range(max_tries):
        deg = np.zeros(n)
        keys = set()
        for i in range(n):
            w = weight[i] * (deg + 1.0)
            w[i] = 0.0
            total = w.sum()
            if total <= 0.0:
                raise GenerationFailed(f"vertex {i} has no admissible target")
            for j in rng.choice(n, size=m, replace=True, p=w / total):
                key = (min(i, j), max(i, j))
                if key not in keys:
                    keys.add(key)
                    deg[i] += 1
                    deg[j] += 1
        g = Graph.from_edges(n, sorted(keys), y, num_classes=int(y.max()))
        if is_connected(g):
            return g
    raise GenerationFailed(f"no connected network after {max_tries} attempts")


def gen_random_graph(num_vertices, num_edges, seed=None, num_classes=2, labeled_fraction=0.05):
    """Connected uniform random graph with exactly ``num_edges`` edges.

    A random recursive tree guarantees connectivity; the remaining edges are
    drawn uniformly among absent pairs. Labels mark ``labeled_fraction`` of
    the vertices, spread round-robin over the classes.
    """
    n = int(num_vertices)
    m = int(num_edges)
    if m < n - 1 or m > n * (n - 1) // 2:
        raise InvalidParameter(f"{m} edges cannot form a connected simple graph on {n} vertices")
    if not 1 <= num_classes <= n:
        raise InvalidParameter(f"num_classes must lie in 1..{n}")
    rng = make_rng(seed)
    perm = rng.permutation(n)
    parent = perm[(rng.random(n - 1) * np.arange(1, n)).astype(np.int64)]
    tree = np.column_stack([perm[1:], parent])
    keys = np.unique(np.minimum(tree[:, 0], tree[:, 1]) * n + np.maximum(tree[:, 0], tree[:, 1]))
    while keys.shape[0] < m:
        need = m - keys.shape[0]
        a = rng.integers(0, n, size=2 * need + 16)
        b = rng.integers(0, n, size=a.shape[0])
        ok = a != b
        cand = np.minimum(a[ok], b[ok]) * n + np.maximum(a[ok], b[ok])
        cand = np.setdiff1d(np.unique(cand), keys)
        cand = rng.permutation(cand)[:need]
        keys = np.union1d(keys, cand)
    i, j = np.divmod(keys, n)
    labels = np.zeros(n, dtype=np.int64)
    nlab = min(n, max(num_classes, int(round(labeled_fraction * n))))
    chosen = rng.choice(n, size=nlab, replace=False)
    labels[chosen] = np.arange(nlab) % num_classes + 1
    return Graph.from_edges(n, np.column_stack([i, j]), labels, num_classes=num_classes)


def torus_knot(theta):
    """Points of the three-dimensional torus knot at parameters ``theta``."""
    theta = np.asarray(theta, dtype=float)
    r = 2.0 + np.cos(4.0 * theta)
    return np.stack([r * np.cos(3.0 * theta), r * np.sin(3.0 * theta), -np.sin(4.0 * theta)], axis=-1)


def gen_torus_knot(n, num_classes, sigma, seed=None):
    """Noisy samples along the torus knot, split into contiguous arcs of theta.

    Class boundaries start at a random angular offset and cut the sorted
    samples into ``num_classes`` runs whose sizes differ by at most one.
    """
    if not 2 <= num_classes <= 10:
        raise InvalidParameter("num_classes must lie in 2..10")
    if n < num_classes:
        raise InvalidParameter("need at least one sample per class")
    if sigma < 0:
        raise InvalidParameter("sigma must be nonnegative")
    rng = make_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    offset = rng.uniform(0.0, 2.0 * np.pi)
    order = np.argsort(np.mod(theta - offset, 2.0 * np.pi), kind="stable")
    labels = np.empty(n, dtype=np.int64)
    for c, chunk in enumerate(np.array_split(order, num_classes), start=1):
        labels[chunk] = c
    points = torus_knot(theta) + rng.normal(0.0, sigma, size=(n, 3))
    return Dataset(points, labels)


def gen_two_gaussians(n_per_class, separation=4.0, seed=None, dim=2):
    """Two isotropic unit-variance Gaussian blobs ``separation`` apart on the first axis."""
    rng = make_rng(seed)
    centers = np.zeros((2, dim))
    centers[1, 0] = separation
    points = np.concatenate([rng.normal(centers[c], 1.0, size=(n_per_class, dim)) for c in (0, 1)])
    labels = np.repeat([1, 2], n_per_class)
    return Dataset(points, labels)


def choose_labeled(y, amount, seed=None):
    """Hide all but a random subset of labels, keeping at least one per class.

    ``amount`` is a count (int) or a fraction (float in (0, 1]).
    Returns the partially labeled vector.
    """
    y = np.asarray(y, dtype=np.int64)
    n = y.shape[0]
    count = int(round(amount * n)) if isinstance(amount, float) else int(amount)
    classes = np.unique(y[y > 0])
    count = max(count, classes.shape[0])
    rng = make_rng(seed)
    picked = [rng.choice(np.flatnonzero(y == c)) for c in classes]
    rest = np.setdiff1d(np.flatnonzero(y > 0), picked)
    extra = rng.choice(rest, size=min(count - len(picked), rest.shape[0]), replace=False)
    out = np.zeros(n, dtype=np.int64)
    keep = np.concatenate([np.asarray(picked, dtype=np.int64), extra.astype(np.int64)])
    out[keep] = y[keep]
    return out
