# %% [markdown]
# # Two blobs, three labels
#
# Build a kNN graph with the smallest connecting k, hide all but 1% of the
# labels and let the classes compete for edges.

# %%
import numpy as np

from lcu import SystemParams, choose_labeled, classify, gen_two_gaussians, run, unfold
from lcu.graph import smallest_connecting_k
from lcu.unfolding import error_rate

data = gen_two_gaussians(150, separation=5.0, seed=2)
y = data.labels
k, g = smallest_connecting_k(data)
g = g.with_labels(choose_labeled(y, 0.01, seed=2), num_classes=2)
print(g, "k =", k)

# %%
state = run(g, SystemParams(lam=1.0, tau=1000))
u = unfold(g, state)
pred = classify(g, u)
print("unfolding sizes", u.sizes(), "unassigned", len(u.unassigned))
print("test error", error_rate(pred, y, g.labeled))

# %% [markdown]
# Overlapping vertices touch edges of both unfoldings. They sit on the strip
# between the blobs.

# %%
over = np.flatnonzero(pred.overlapping & ~g.labeled)
print(len(over), "overlapping vertices")
print("mean |x - 2.5| overall   ", np.abs(data.points[:, 0] - 2.5).mean().round(2))
print("mean |x - 2.5| overlapping", np.abs(data.points[over, 0] - 2.5).mean().round(2))

# %% [markdown]
# The competition level matters little here; with lambda = 0 the walks
# never absorb each other and domination is proportional to visit counts.

# %%
for lam in (0.0, 0.5, 1.0):
    p = classify(g, unfold(g, run(g, SystemParams(lam=lam, tau=1000))))
    print(lam, round(error_rate(p, y, g.labeled), 4))
