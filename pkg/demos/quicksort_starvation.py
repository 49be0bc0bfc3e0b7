"""Naive quicksort against a pivot-starving adversary, next to rsort.

On all-equal values every comparison is close, so the adversary may let
each pivot lose to everything. Quicksort then peels one item per round.
At these sizes rsort pays a similar comparison count (its pivot trials
are the fixed cost) but needs far fewer rounds.
"""

import numpy as np

from advsort import Oracle, naive_quicksort, realized_sort_error, rsort

for n in (64, 128, 256, 512):
    values = np.zeros(n)
    q = Oracle(values, "pivot-starver")
    naive_quicksort(q, seed=0)
    r = Oracle(values, "pivot-starver")
    order = rsort(r)
    qc, qr = q.snapshot_counts()
    rc, rr = r.snapshot_counts()
    print(f"n={n:4d}  quicksort {qc:7d} cmp {qr:4d} rounds | rsort {rc:7d} cmp {rr:3d} rounds, "
          f"error {realized_sort_error(values, order):.1f}")
