"""Selection with a fixed round budget on a family built to be dense at the target rank."""

from advsort import Oracle, select_combined_detailed, selection_error
from advsort.bench import make_instance, target_rank

n, d = 4096, 3
for family in ("uniform", "dense-at-rank", "sparse-at-rank"):
    inst = make_instance(family, n, seed=2)
    k = target_rank(family, n)
    o = Oracle(inst, "cycle-forcer")
    res = select_combined_detailed(o, k=k, d=d, seed=5)
    print(f"{family:15s} k={k:4d} branch={res.branch:5s} sparse={res.sparse_path:5s} "
          f"error={selection_error(inst, k, res.item):.3f} K={res.K:g} rounds={o.snapshot_counts()[1]}")
