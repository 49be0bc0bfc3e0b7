"""Which phase produced each split of an rsort run, and how good it was.

A clustered instance packs more than n/8 items into one unit-wide band, so
pivots tend to fail and the sample and shifting phases take over.
"""

from collections import Counter

from advsort import Oracle, RSortParams, partition_gap, realized_sort_error, rsort
from advsort.bench import make_instance

inst = make_instance("clustered", 2048, seed=1)
certs = []
order = rsort(Oracle(inst, "pivot-starver"), params=RSortParams(seed=3), certificates=certs)

print("splits by phase:", dict(Counter(c.phase_used for c in certs)))
worst = max(certs, key=lambda c: partition_gap(inst, c.Y, c.Ybar))
print(f"worst split: depth {worst.depth}, {worst.phase_used}, |Y|={worst.Y.size}, |Ybar|={worst.Ybar.size}, "
      f"gap {partition_gap(inst, worst.Y, worst.Ybar):.3f}")
print(f"realized error of the output: {realized_sort_error(inst, order):.3f}")
