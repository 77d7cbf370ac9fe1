"""
Distribution of invariant magnitudes on random semi-simple states
=================================================================

"""

from qutrit_invariants import closed_form as cf
from qutrit_invariants.stats import histogram, histogram_auto, last_bin_fraction, sample_and_evaluate

table = sample_and_evaluate(500_000, seed=0, threads=None)
uppers = {"Delta333": cf.M_DELTA, "I6": cf.M_I6, "I9": cf.M_I9, "I12": cf.M_I12, "S_I": cf.M_S_INDEX}

# share of samples in the top bin, fixed 100 bins on [0, max] versus numpy's automatic bins
for tag, upper in uppers.items():
    values = table.values(tag)
    fixed = 100 * last_bin_fraction(histogram(values, 100, upper))
    auto_h = histogram_auto(values)
    auto = 100 * last_bin_fraction(auto_h)
    print(f"{tag:9s} fixed {fixed:.4f}%   auto {auto:.4f}% ({len(auto_h.counts)} bins)")

with open("delta_histogram.csv", "w") as fh:
    fh.write(histogram(table.values("Delta333"), 100, cf.M_DELTA).to_csv())
