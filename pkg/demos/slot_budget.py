"""Slots-to-discovery distribution versus the geometric law.

Runs many discovery trials, checks that the number of contention slots a
pair needs is Geometric(p_success), and compares the empirical 90% point
with the analytic slot budget.
"""

import numpy as np

from d2d_discovery import (AnalyticParams, ExperimentConfig,
                           discovery_success_prob, geometric_gof_pvalue,
                           required_slot_count, run_trial)

params = AnalyticParams(user_density=0.05, n_pairs=4, sir_threshold_db=0.0,
                        target_success_prob=0.9)
cfg = ExperimentConfig(analytic=params, trials=1, slots_cap=600, seed=11)

slots = np.array([n for i in range(2000)
                  for n in run_trial(cfg, i).slots_to_success])
p = discovery_success_prob(params)

print(f"per-slot success probability     {p:.4f}")
print(f"mean slots  empirical/analytic   {slots.mean():.2f} / {1 / p:.2f}")
print(f"geometric GOF p-value            {geometric_gof_pvalue(slots, p):.3f}")

grid = np.arange(1, slots.max() + 1)
cdf = np.array([(slots <= n).mean() for n in grid])
emp_n = int(grid[np.argmax(cdf >= 0.9)])
print(f"slots for 90% discovery          {emp_n} empirical, "
      f"{required_slot_count(params)} analytic")
