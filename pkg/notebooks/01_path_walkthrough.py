# %% [markdown]
# # Three vertices, two classes
#
# The smallest interesting case: a path 0-1-2 with vertex 0 labeled 1,
# vertex 2 labeled 2 and the middle vertex unlabeled. Every number below can
# be checked by hand.

# %%
import numpy as np

from lcu import Graph, SystemParams, classify, init_state, overlap_profile, step, unfold

g = Graph.from_edges(3, [(0, 1), (1, 2)], labels=[1, 0, 2], num_classes=2)
params = SystemParams(lam=1.0, init="sources")
s = init_state(g, params)
print(s.population)

# %% [markdown]
# Each class starts with deg(v) particles at its own source. No flow has been
# recorded yet, so every edge has subordination 1 - 1/C = 0.5 and a class-1
# particle leaving vertex 0 survives with probability 0.5.

# %%
s = step(g, s, params)
print("population", s.population)
print("class 1 flow\n", s.flow_matrix(g, 1).toarray())

# %% [markdown]
# Half a particle of each class reached the middle vertex; the other half was
# absorbed and is regenerated at the source on the next step.

# %%
s = step(g, s, params)
print("population", s.population)
print("class 1 domination\n", s.domination_matrix(g, 1).toarray())

# %%
u = unfold(g, step(g, init_state(g, params), params))
print(u.edge_sets())
pred = classify(g, u)
print("labels", pred.labels, "scores of vertex 1", pred.scores[1], "overlapping", pred.overlapping[1])
print(overlap_profile(g, u, 1))

# %% [markdown]
# Vertex 1 touches one edge of each unfolding. The tie goes to the lower
# class id and the vertex is flagged as overlapping.
