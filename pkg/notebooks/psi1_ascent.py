"""
Random-perturbation ascent of |Delta333| from Psi1
==================================================

"""

from qutrit_invariants import closed_form as cf
from qutrit_invariants.invariants_matrix import hyperdet
from qutrit_invariants.optimize import is_critical_state, perturb_and_ascend
from qutrit_invariants.states import named_state

start = named_state("psi1")
print("start |Delta| / max:", abs(hyperdet(start)) / cf.M_DELTA)
print("start critical:", is_critical_state(start, "Delta333"))

res = perturb_and_ascend(start)
print(f"end |Delta| / max: {res.value / cf.M_DELTA:.14f}")
print(f"accepted {res.accepted} of {res.proposals} proposals")
# the ascent halts ~1e-7 from the exact peak, just outside the 1e-6 * max residual threshold
print("end critical:", is_critical_state(res.state, "Delta333"))
