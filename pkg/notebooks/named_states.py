"""
Invariant magnitudes of named 3-qutrit states
=============================================

"""

import numpy as np

from qutrit_invariants import fundamental_invariants, named_state

tags = ["ghz333", "aharonov", "d3_111", "d3_3", "psi1", "psi2", "psi3", "d3_2", "w", "w333", "maxdelta:1"]

print(f"{'state':12s} {'|I6|':>12s} {'|I9|':>12s} {'|I12|':>12s} {'|Delta333|':>12s}")
for tag in tags:
    m = fundamental_invariants(named_state(tag)).magnitudes()
    print(f"{tag:12s} {m['I6']:12.4e} {m['I9']:12.4e} {m['I12']:12.4e} {m['Delta333']:12.4e}")

# the two evaluation paths agree on a semi-simple triple
from qutrit_invariants import closed_form as cf
from qutrit_invariants.states import semisimple_to_tensor

p = np.array([0.2, 0.5, -0.6])
p /= np.linalg.norm(p)
print(fundamental_invariants(semisimple_to_tensor(p)).Delta333, cf.delta_ss(*p))
