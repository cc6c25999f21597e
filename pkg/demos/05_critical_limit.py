"""The critical scaling limit: t^(2/3) growth with a jump-structured law.

Samples the limiting front value (twice the integrated positive part of a
scaled Brownian path, inverted) and compares a modest particle ensemble
against it after t^(-2/3) rescaling.  The sine profile's deterministic
counterpart has closed forms.
"""

import math

import numpy as np

from frontlab import experiments, limitlaw
from frontlab.experiments import EnsembleConfig

T = 3e3
cfg = EnsembleConfig(n_runs=40, horizon=T, window=1500, master_seed=51,
                     family="geometric", mean=1.0, max_resizes=3,
                     checkpoints=(30.0, 300.0, T))
res = experiments.run_ensemble(cfg)
rescaled = np.where(res.exploded, np.inf, res.final_front) / T ** (2.0 / 3.0)
print(f"particle ensemble at T={T:g} (geometric, variance 2):")
print(f"  median T^(-2/3) r(T) = {np.median(rescaled):.3f}")

samples = limitlaw.sample_front_values(math.sqrt(2.0), 1.0, 2000, seed=5)
print(f"limit law: median = {np.median(samples):.3f} over 2000 samples")

test = experiments.limit_distribution_test(
    np.where(res.exploded, np.inf, res.final_front.astype(float)), T, samples)
print(f"two-sample KS statistic: {test.ks_statistic:.3f} "
      f"({test.n_front} vs {test.n_limit} samples)")

path = limitlaw.sample_limit_front(1.0, xi_max=4.0, dxi=0.005, seed=9)
jumps = np.diff(path.frnt.values[np.isfinite(path.frnt.values)])
print(f"\none sampled limit path: front jumps at {np.sum(jumps > 0.2)} places "
      f"by more than 0.2 (negative driver excursions)")

print("\ndeterministic sine counterpart:")
for t in (1.0, 2.0, 3.9, 4.0):
    print(f"  Frnt({t}) = {limitlaw.front_sine(t):.4f}")
print("  (the jump at t=4 crosses the surplus half-period instantly)")
