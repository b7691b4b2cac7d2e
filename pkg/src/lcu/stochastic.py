"""Stochastic particle-competition system.

Integer particles walk the graph. At each step every active particle of class
``c`` at vertex ``i`` picks a neighbor ``j`` uniformly. Moving into a rival
source absorbs it; otherwise it survives with probability ``1 - lam * xi``,
where ``xi`` is the relative subordination of ``c`` on the edge computed from
the previous step's flows. Sources then replace lost particles.

Several independent runs are simulated side by side: every array carries a
leading run axis. Movement is drawn as one multinomial per (run, class,
vertex) followed by binomial thinning per directed edge, which has the same
law as moving particles one at a time.

Generation draws ``Multinomial(deficit, rho_c)`` over the sources of ``c``,
where ``deficit = initial_total - population(t)``. Each source's count is
therefore ``Binomial(deficit, rho_i)`` and the total never exceeds the
deficit, so the population of a class never exceeds its initial total.

RNG stream order within a step: movement (vertex groups by ascending degree),
survival thinning, generation (class by class).
"""

from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .deterministic import sink_mask, source_shares, subordination_matrix
from .errors import InvalidParameter


@dataclass
class ParticleEnsemble:
    t: int
    counts: np.ndarray  # (R, C, V) active particles
    flows: np.ndarray  # (R, C, nnz) survivors of the last step per directed edge
    cum: np.ndarray  # (R, C, nnz) cumulative domination
    initial_total: np.ndarray  # (C,)
    absorbed: np.ndarray  # (R, C, V) absorbed during the last step, by origin vertex
    generated: np.ndarray  # (R, C, V) generated during the last step

    @property
    def runs(self):
        return self.counts.shape[0]

    @property
    def num_classes(self):
        return self.counts.shape[1]

    @property
    def domination(self):
        """Cumulative domination averaged over runs, ``(C, nnz)`` floats."""
        return self.cum.mean(axis=0)

    @property
    def mean_flow(self):
        return self.flows.mean(axis=0)

    def totals(self):
        return self.counts.sum(axis=-1)


def largest_remainder(weights, total):
    """Integer apportionment of ``total`` proportional to ``weights``.

    Leftover units go to the largest fractional parts; equal remainders are
    resolved in favor of the lower index.
    """
    w = np.asarray(weights, dtype=float)
    quota = total * w / w.sum()
    base = np.floor(quota).astype(np.int64)
    left = int(total - base.sum())
    if left:
        order = np.argsort(-(quota - base), kind="stable")
        base[order[:left]] += 1
    return base


def init_particles(g, total_per_class, runs=1):
    """Place ``total_per_class`` particles of every class proportionally to degree."""
    total = int(total_per_class)
    if total < 1 or total != total_per_class:
        raise InvalidParameter(f"total_per_class must be a positive integer, got {total_per_class}")
    if runs < 1:
        raise InvalidParameter("runs must be positive")
    C, V, E = g.num_classes, g.num_vertices, g.nnz
    per_vertex = largest_remainder(g.degrees, total)
    counts = np.broadcast_to(per_vertex, (runs, C, V)).copy()
    zeros_e = np.zeros((runs, C, E), dtype=np.int64)
    zeros_v = np.zeros((runs, C, V), dtype=np.int64)
    return ParticleEnsemble(0, counts, zeros_e, zeros_e.copy(), np.full(C, total, dtype=np.int64),
                            zeros_v, zeros_v.copy())


class _Kernel:
    def __init__(self, g):
        self.g = g
        self.sinks = sink_mask(g)
        self.shares = source_shares(g)
        self.sources = [np.flatnonzero(s > 0) for s in self.shares]
        self.groups = []
        deg = g.degrees
        for d in np.unique(deg):
            verts = np.flatnonzero(deg == d)
            pos = g.indptr[verts][:, None] + np.arange(d)
            self.groups.append((int(d), verts, pos))

    def scatter_sum(self, values, index, size):
        """Sum ``values[..., k]`` into bins ``index[k]`` for every leading slice."""
        lead = values.shape[:-1]
        slots = int(np.prod(lead))
        offs = (np.arange(slots) * size)[:, None] + index[None, :]
        out = np.bincount(offs.ravel(), weights=values.reshape(slots, -1).ravel(),
                          minlength=slots * size)
        return np.rint(out).astype(np.int64).reshape(*lead, size)


def stoch_step(g, ens, lam, rng, kernel=None):
    """One step of the particle system for every run in ``ens``."""
    k = kernel or _Kernel(g)
    V = g.num_vertices
    rng = make_rng(rng)
    counts = ens.counts
    moves = np.zeros(ens.flows.shape, dtype=np.int64)
    for d, verts, pos in k.groups:
        n = counts[..., verts]
        if d == 1:
            moves[..., pos[:, 0]] = n
        else:
            moves[..., pos] = rng.multinomial(n, np.full(d, 1.0 / d))
    xi = subordination_matrix(g, ens.flows)
    survive = np.where(k.sinks, 0.0, 1.0 - lam * xi)
    survivors = rng.binomial(moves, survive)
    arrivals = k.scatter_sum(survivors, g.indices, V)
    departed = k.scatter_sum(survivors, g.row, V)
    absorbed = counts - departed
    deficit = np.maximum(0, ens.initial_total[None, :] - counts.sum(axis=-1))
    generated = np.zeros_like(counts)
    for c, src in enumerate(k.sources):
        generated[:, c, src] = rng.multinomial(deficit[:, c], k.shares[c, src])
    return ParticleEnsemble(ens.t + 1, arrivals + generated, survivors, ens.cum + survivors,
                            ens.initial_total, absorbed, generated)


def stoch_run(g, total_per_class, lam, tau, seed=None, runs=1, callback=None):
    """Run ``runs`` independent simulations for ``tau`` steps from ``init_particles``."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidParameter(f"lambda must lie in [0, 1], got {lam}")
    rng = make_rng(seed)
    kernel = _Kernel(g)
    ens = init_particles(g, total_per_class, runs)
    for _ in range(int(tau)):
        ens = stoch_step(g, ens, lam, rng, kernel)
        if callback is not None:
            callback(ens)
    return ens
