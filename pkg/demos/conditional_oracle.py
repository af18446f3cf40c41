"""
The beta test against the conditional test
==========================================

For three variables the unbiased test of one off-diagonal entry of the
sample covariance, given all other entries, can be computed directly: the
conditional density is det(S) ** ((n - 5) / 2) on the interval where S stays
positive definite, and the critical values solve a size and a first-moment
equation. Its decisions should match the beta threshold on |r|.
"""

# %%
import numpy as np

from ggms import make_config
from ggms.oracle import ConditionalSlice, check_agreement, critical_values, pd_interval, wishart_sample

n, alpha = 10, 0.05
s = wishart_sample(n, seed=0, stream=0)
sl = ConditionalSlice(s, (0, 1))
lo, hi = pd_interval(sl)
c1, c2 = critical_values(sl, n, alpha)
print(np.round(s, 4))
print(f"interval ({lo:.6f}, {hi:.6f}), critical values ({c1:.6f}, {c2:.6f})")

# %%
# r is affine in s_01 with r = -1, 1 at the interval ends, so the critical
# values sit at the fraction t of the half-width.
mid, half = (lo + hi) / 2, (hi - lo) / 2
print((c2 - mid) / half, make_config(n, 3, alpha).threshold)

# %%
res = check_agreement(60, n, alpha, seed=1)
print(f"agreement {res.agreements}/{res.samples}, closest |r| to t: {res.min_distance:.2e}")
