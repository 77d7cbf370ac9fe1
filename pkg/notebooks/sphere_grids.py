"""
Invariants on a (theta, phi) grid of the semi-simple sphere
===========================================================

"""

import numpy as np

from qutrit_invariants.stats import sphere_grid

for tag in ("I6", "I9", "I12", "Delta333"):
    g = sphere_grid(tag, 91, 180)
    k = np.unravel_index(np.argmax(np.abs(g.values)), g.values.shape)
    a, b, c = (x[k] for x in g.coordinates())
    print(f"{tag:9s} max |value| {np.abs(g.values).max():.4e} at (a, b, c) = ({a:.3f}, {b:.3f}, {c:.3f})")

with open("delta_grid.csv", "w") as fh:
    fh.write(sphere_grid("Delta333", 181, 360).to_csv())
