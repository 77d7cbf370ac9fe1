"""
Maximizing invariant magnitudes over the semi-simple sphere
===========================================================

"""

import numpy as np

from qutrit_invariants import closed_form as cf
from qutrit_invariants.optimize import OptConfig, maximize_abs

maxima = {"I6": cf.M_I6, "I9": cf.M_I9, "I12": cf.M_I12, "Delta333": cf.M_DELTA, "S_I": cf.M_S_INDEX}

for tag, m in maxima.items():
    res = maximize_abs(tag, OptConfig(restarts=64, rng_seed=0))
    print(f"{tag:9s} best {res.best_value:.10e} (known {m:.10e}) at {np.round(res.best_point, 6)}")
    print(f"          restarts reaching the maximum: {res.hit_fraction(m):.0%}")
    print(f"          distinct local optima: {len(res.all_local_optima)}")
