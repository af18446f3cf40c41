"""
Exact size in small samples
===========================

On a model with no edges every rejection is a false inclusion. The beta
test rejects each pair at rate alpha for any n > p. The asymptotic Fisher z
rule drifts when n is close to p.
"""

# %%
import numpy as np

from ggms import FisherZ, LossSpec, OptimalUnbiased, compare_procedures, generate_model

model = generate_model(5, "empty")
alpha, reps = 0.05, 20_000
losses = LossSpec.from_alpha(alpha)
iu = np.triu_indices(5, 1)

# %%
print(f"{'n':>4} {'exact':>8} {'fisher z':>9}   (target {alpha}, 3 SE = {3 * np.sqrt(alpha * (1 - alpha) / reps):.4f})")
for n in (7, 8, 10, 20, 50):
    exact, fz = compare_procedures(model, [OptimalUnbiased(losses), FisherZ(alpha)], n, reps, losses, seed=n)
    r1 = np.mean(np.array(exact.per_edge_rejection_rate)[iu])
    r2 = np.mean(np.array(fz.per_edge_rejection_rate)[iu])
    print(f"{n:4d} {r1:8.4f} {r2:9.4f}")
