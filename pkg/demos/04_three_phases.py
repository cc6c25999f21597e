"""The three phases at desk scale: diffusive, critical, explosive.

Small ensembles at densities 0.5, 1.0 and 1.2.  Below one the rescaled
front tracks the square-root law; at one it grows super-diffusively but
sub-linearly; above one the front exits any window in finite time.
"""

import numpy as np

from frontlab import experiments, stefan
from frontlab.experiments import EnsembleConfig

# diffusive
eps = 0.05
cfg = EnsembleConfig(n_runs=40, horizon=eps**-2, window=250, master_seed=41,
                     family="poisson", mean=0.5, checkpoints=(eps**-2,))
res = experiments.run_ensemble(cfg)
kappa = stefan.solve_kappa(0.5)
print(f"rho=0.5: median eps*r = {np.median(eps * res.fronts[:, 0]):.3f} "
      f"vs kappa = {kappa:.3f}")

# critical
cfg = EnsembleConfig(n_runs=40, horizon=1e3, window=1200, master_seed=42,
                     checkpoints=(10.0, 100.0, 1000.0))
res = experiments.run_ensemble(cfg)
meds = np.median(np.where(res.fronts < 0, np.inf, res.fronts), axis=0)
print(f"rho=1.0: median fronts at t=10,100,1000: {meds}")
print("         r / sqrt(t):", np.round(meds / np.sqrt(res.checkpoints), 2),
      " (growing => super-diffusive)")
print("         r / t:      ", np.round(meds / res.checkpoints, 3),
      " (shrinking => sub-linear)")

# explosive
cfg = EnsembleConfig(n_runs=20, horizon=5e3, window=20000, master_seed=43,
                     family="geometric", mean=1.2, stop_on_explosion=True)
res = experiments.run_ensemble(cfg)
rep = experiments.phase_report(1.2, res)
print(f"rho=1.2: {rep.detail['n_exploded']}/20 runs exploded, "
      f"median blow-up time {rep.detail['median_time']:.1f}")
