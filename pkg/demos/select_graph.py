"""
Selecting a graph from one sample
=================================

Draw a sample from a chain model, then select edges with the exact per-edge
tests. Losses a (false inclusion) and b (false exclusion) fix each edge's
level at b / (a + b).
"""

# %%
import numpy as np

from ggms import LossSpec, OptimalUnbiased, generate_model, sample_gaussian, select_with_alpha

model = generate_model(6, "chain", 0.4)
x = sample_gaussian(model, 60, seed=3)
print("true edges:", model.graph.edge_list())

# %%
# Uniform losses (0.95, 0.05) are the same as testing every pair at 5%.
res = OptimalUnbiased(LossSpec(0.95, 0.05)).fit(x)
print("selected:  ", res.graph.edge_list())
print(np.round(res.partials, 3))
assert res.graph == select_with_alpha(x, 0.05)

# %%
# Making false exclusions ten times as costly raises the level to 10/11 on
# every pair. Edges can only be added.
loose = OptimalUnbiased(LossSpec(1.0, 10.0)).select(x)
print("b = 10a:   ", loose.edge_list())

# %%
# Per-pair losses: missing the pair (0, 5) is made as costly as a false
# inclusion, so only that pair is tested at level 1/2.
p = model.p
a = np.full((p, p), 0.95)
b = np.full((p, p), 0.05)
b[0, 5] = b[5, 0] = 0.95
res = OptimalUnbiased(LossSpec(a, b)).fit(x)
print(np.round(res.alpha_matrix, 3))
print(res.to_edgelist())
