"""
The exact threshold for one partial correlation
===============================================

Under "no edge" the sample partial correlation r of two variables, given
the other p - 2, satisfies (r + 1) / 2 ~ Beta((n - p)/2, (n - p)/2) for every
n > p. The level-alpha test keeps the edge out while |r| < t = 1 - 2q, with q
the alpha/2 quantile of that law.
"""

# %%
# With n - p = 2 the beta law is uniform, so t = 1 - alpha exactly.
from ggms import make_config

cfg = make_config(22, 20, 0.05)
print(cfg.quantile, cfg.threshold)

# %%
# The threshold shrinks like 1/sqrt(n). The Fisher z rule tanh(z / sqrt(n - p - 1))
# is close for large n and loose for small n.
import math
from statistics import NormalDist

z = NormalDist().inv_cdf(0.975)
print(f"{'n':>5} {'exact t':>10} {'fisher z t':>11}")
for n in (7, 8, 10, 15, 25, 50, 100, 400):
    t = make_config(n, 5, 0.05).threshold
    print(f"{n:5d} {t:10.6f} {math.tanh(z / math.sqrt(n - 5 - 1)):11.6f}")

# %%
# The threshold depends on the per-edge level only, so unequal losses just
# move individual edges to different rows of this table.
for alpha in (0.001, 0.01, 0.05, 0.2, 0.5):
    print(alpha, round(make_config(30, 5, alpha).threshold, 6))
