"""Deterministic particle-competition system.

The state holds, for every class ``c``, the population ``n_c`` over vertices,
the last-step directed flow ``N_c`` and the cumulative domination ``D_c`` over
directed edges. One step applies

    N_c(t+1) = diag(n_c(t)) P_c
    n_c(t+1) = n_c(t) P_c + g_c
    D_c(t+1) = D_c(t) + N_c(t+1)

where ``P_c`` is the survival-weighted random-walk matrix and ``g_c`` tops the
population back up at the class sources.

Class ids are ``1..C`` in the public API; arrays are indexed ``c - 1``.
Directed-edge arrays follow the CSR entry order of the graph.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .errors import InvalidParameter

INIT_ALIASES = {
    "degree": "degree",
    "degree_all_classes": "degree",
    "sources": "sources",
    "degree_sources_only": "sources",
}


@dataclass(frozen=True)
class SystemParams:
    """Parameters of a deterministic run.

    ``init`` is ``"degree"`` (every class starts with ``deg(v)`` at every
    vertex), ``"sources"`` (only at the sources of the class) or an explicit
    ``(C, V)`` array. ``update`` selects ``"synchronous"`` (all classes read the
    same time-t flows) or ``"sequential"`` (class c sees classes < c already
    advanced). ``patience`` enables early stopping once the unfolding has been
    unchanged for that many consecutive steps.
    """

    lam: float = 1.0
    tau: int = 1000
    init: object = "degree"
    update: str = "synchronous"
    patience: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidParameter(f"lambda must lie in [0, 1], got {self.lam}")
        if self.tau < 0:
            raise InvalidParameter(f"tau must be nonnegative, got {self.tau}")
        if self.update not in ("synchronous", "sequential"):
            raise InvalidParameter(f"unknown update mode {self.update!r}")
        if isinstance(self.init, str) and self.init not in INIT_ALIASES:
            raise InvalidParameter(f"unknown init scheme {self.init!r}")
        if self.patience is not None and self.patience < 1:
            raise InvalidParameter("patience must be positive")


@dataclass
class SystemState:
    t: int
    population: np.ndarray  # (C, V)
    flow: np.ndarray  # (C, nnz)
    domination: np.ndarray  # (C, nnz)
    initial_total: np.ndarray  # (C,)

    @property
    def num_classes(self):
        return self.population.shape[0]

    def totals(self):
        return self.population.sum(axis=1)

    def copy(self):
        return SystemState(self.t, self.population.copy(), self.flow.copy(),
                           self.domination.copy(), self.initial_total.copy())

    def flow_matrix(self, g, c):
        return _as_csr(g, self.flow[c - 1])

    def domination_matrix(self, g, c):
        return _as_csr(g, self.domination[c - 1])


def _as_csr(g, values):
    n = g.num_vertices
    return sparse.csr_matrix((values.copy(), g.indices, g.indptr), shape=(n, n))


def initial_population(g, init="degree"):
    C, V = g.num_classes, g.num_vertices
    if isinstance(init, str):
        scheme = INIT_ALIASES.get(init)
        if scheme is None:
            raise InvalidParameter(f"unknown init scheme {init!r}")
        deg = g.degrees.astype(float)
        pop = np.tile(deg, (C, 1))
        if scheme == "sources":
            pop *= g.labels[None, :] == np.arange(1, C + 1)[:, None]
    else:
        pop = np.array(init, dtype=float)
        if pop.ndim == 1:
            pop = np.tile(pop, (C, 1))
        if pop.shape != (C, V):
            raise InvalidParameter(f"custom population must have shape ({C}, {V})")
        if np.any(pop < 0) or not np.all(np.isfinite(pop)):
            raise InvalidParameter("custom population must be finite and nonnegative")
    if np.any(pop.sum(axis=1) <= 0):
        raise InvalidParameter("every class needs a positive initial population")
    return pop


def init_state(g, params=None):
    params = params or SystemParams()
    pop = initial_population(g, params.init)
    zeros = np.zeros((g.num_classes, g.nnz))
    return SystemState(0, pop, zeros, zeros.copy(), pop.sum(axis=1))


def sink_mask(g):
    """``(C, nnz)`` booleans: entry ``i -> j`` is a sink for class c (``y_j`` not in {0, c})."""
    target = g.labels[g.indices]
    classes = np.arange(1, g.num_classes + 1)[:, None]
    return (target[None, :] != 0) & (target[None, :] != classes)


def source_shares(g):
    """``(C, V)`` degree-proportional share of generation at each source."""
    classes = np.arange(1, g.num_classes + 1)[:, None]
    w = np.where(g.labels[None, :] == classes, g.degrees[None, :].astype(float), 0.0)
    return w / w.sum(axis=1, keepdims=True)


def subordination_matrix(g, flow):
    """Relative subordination of every class on every directed entry.

    ``flow`` is a ``(..., C, nnz)`` snapshot (real or integer). Entry
    ``(c, k)`` is the fraction of the two-way flow on the edge of ``k`` not
    carried by class ``c``, or ``1 - 1/C`` when the edge carried nothing.
    """
    C = flow.shape[-2]
    both = flow + flow[..., g.reverse]
    total = both.sum(axis=-2, keepdims=True)
    busy = total > 0
    share = np.divide(both, total, out=np.zeros(both.shape), where=busy)
    return np.where(busy, 1.0 - share, 1.0 - 1.0 / C)


def subordination(g, state, c, i, j):
    flow = state.flow
    k, kr = g.position(i, j), g.position(j, i)
    total = float(np.sum(flow[:, k] + flow[:, kr]))
    if total > 0:
        return 1.0 - float(flow[c - 1, k] + flow[c - 1, kr]) / total
    return 1.0 - 1.0 / flow.shape[0]


def transition_values(g, sigma, lam, sinks=None):
    if sinks is None:
        sinks = sink_mask(g)
    walk = 1.0 / g.degrees[g.row]
    return np.where(sinks, 0.0, walk[None, :] * (1.0 - lam * sigma))


def transition_matrix(g, state, c, lam):
    sigma = subordination_matrix(g, state.flow)[c - 1]
    vals = transition_values(g, sigma[None, :], lam, sink_mask(g)[c - 1:c])[0]
    return _as_csr(g, vals)


def generation_vector(g, state, c):
    deficit = max(0.0, float(state.initial_total[c - 1] - state.population[c - 1].sum()))
    return source_shares(g)[c - 1] * deficit


def _threads():
    try:
        return max(0, int(os.environ.get("LCU_THREADS", "0")))
    except ValueError:
        return 0


class _Kernel:
    """Per-graph constants reused across steps."""

    def __init__(self, g):
        self.g = g
        self.sinks = sink_mask(g)
        self.shares = source_shares(g)
        self.walk = 1.0 / g.degrees[g.row]

    def advance(self, c, pop, sigma_c, lam, initial_total):
        g = self.g
        p = np.where(self.sinks[c], 0.0, self.walk * (1.0 - lam * sigma_c))
        flow = pop[g.row] * p
        deficit = initial_total - pop.sum()
        new_pop = np.bincount(g.indices, weights=flow, minlength=g.num_vertices)
        if deficit > 0:
            new_pop += self.shares[c] * deficit
        return new_pop, flow


def step(g, state, params, kernel=None):
    """Advance the system by one time step and return the new state."""
    kernel = kernel or _Kernel(g)
    C = state.num_classes
    pop = np.empty_like(state.population)
    flow = np.empty_like(state.flow)
    if params.update == "sequential":
        current = state.flow.copy()
        for c in range(C):
            sigma = subordination_matrix(g, current)[c]
            pop[c], flow[c] = kernel.advance(c, state.population[c], sigma, params.lam,
                                             state.initial_total[c])
            current[c] = flow[c]
    else:
        sigma = subordination_matrix(g, state.flow)

        def one(c):
            return kernel.advance(c, state.population[c], sigma[c], params.lam,
                                  state.initial_total[c])

        threads = _threads()
        if threads > 1 and C > 1:
            with ThreadPoolExecutor(max_workers=min(threads, C)) as pool:
                results = list(pool.map(one, range(C)))
        else:
            results = [one(c) for c in range(C)]
        for c, (p, f) in enumerate(results):
            pop[c], flow[c] = p, f
    return SystemState(state.t + 1, pop, flow, state.domination + flow, state.initial_total)


def run(g, params=None, state=None, callback=None):
    """Iterate ``params.tau`` steps from ``init_state`` (or from ``state``).

    ``callback(state)`` is invoked after every step. With ``params.patience``
    set, stops early once the unfolding is unchanged for that many steps.
    """
    from .unfolding import edge_owner

    params = params or SystemParams()
    if state is None:
        state = init_state(g, params)
    kernel = _Kernel(g)
    owner, stable = None, 0
    for _ in range(params.tau):
        state = step(g, state, params, kernel)
        if callback is not None:
            callback(state)
        if params.patience is not None:
            current = edge_owner(g, state.domination)
            stable = stable + 1 if owner is not None and np.array_equal(owner, current) else 0
            owner = current
            if stable >= params.patience:
                break
    return state


def scaled(params, kappa, g):
    """Copy of ``params`` whose initial population is multiplied by ``kappa``."""
    return replace(params, init=kappa * initial_population(g, params.init))
