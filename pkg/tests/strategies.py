"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from lcu.graph import gen_random_graph


def random_labeled_graph(seed, n, extra, C):
    rng = np.random.default_rng(seed)
    C = min(C, n)
    g = gen_random_graph(n, min(n - 1 + extra, n * (n - 1) // 2), seed=seed, num_classes=C,
                         labeled_fraction=0.0)
    labels = np.zeros(n, dtype=int)
    picks = rng.choice(n, size=min(n, C + int(rng.integers(0, 3))), replace=False)
    labels[picks] = np.arange(len(picks)) % C + 1
    return g.with_labels(labels, num_classes=C)


graphs = st.builds(random_labeled_graph, st.integers(0, 2**31), st.integers(3, 14),
                   st.integers(0, 12), st.integers(1, 4))
lams = st.sampled_from([0.0, 0.25, 0.5, 1.0])
