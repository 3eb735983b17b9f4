"""A first walk: build a memory comb, simulate, and look at the runs.

The walker keeps moving in its current direction; after k steps in a row
the probability of turning is the comb's hazard at age k.  Every comb is
two hazard sequences, one per direction, and everything else in the
package is derived from them.
"""

import numpy as np

from combwalk import constant_comb, power_comb, simulate_prw

rng_seed = 42

# --- a light-tailed comb: constant hazards, geometric runs ---------------
comb = constant_comb(0.25, 0.4)
traj = simulate_prw(comb, 50_000, seed=rng_seed)
pos = traj.positions()

print("constant hazards (0.25 up, 0.4 down)")
print(f"  steps            : {len(traj.steps())}")
print(f"  final position   : {pos[-1]}")
print(f"  empirical drift  : {pos[-1] / len(traj.steps()):+.4f}")
print(f"  completed runs   : {len(traj.lengths)}")

up = traj.lengths[traj.directions == "u"]
dn = traj.lengths[traj.directions == "d"]
print(f"  mean run length  : up {up.mean():.3f} (law says 4.0), "
      f"down {dn.mean():.3f} (law says 2.5)")

# run-length histogram against the comb's own law
law = comb.up_law
ks = np.arange(1, 11)
emp = np.array([(up == k).mean() for k in ks])
exact = law.pmf(ks)
print("  up-run pmf, first 10 lengths (empirical / exact):")
for k, e, p in zip(ks, emp, exact):
    print(f"    {k:2d}: {e:.4f} / {p:.4f}")

# --- a heavy-tailed comb: hazards decay like a/k ------------------------
heavy = power_comb(0.5)
traj = simulate_prw(heavy, 50_000, seed=rng_seed)
print()
print("power-law hazards, tail index 0.5 (runs have infinite mean)")
print(f"  completed runs   : {len(traj.lengths)}")
print(f"  longest run      : {traj.lengths.max()}")
print(f"  final position   : {traj.positions()[-1]}")
print("  a handful of runs eats the whole horizon -- that is the")
print("  anomalous regime in one sentence.")
