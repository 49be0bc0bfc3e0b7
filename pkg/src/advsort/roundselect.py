"""Constant-approximate selection in a fixed number of rounds.

:func:`select_combined` runs three pieces side by side and then settles
between them with two more rounds:

* a sparse selector, which sorts many small random subsets in ``d`` rounds,
  keeps the items that land near the target rank, and then resolves the
  rank among them (or takes an approximate max/min of the clear losers);
* a dense selector, which sorts one large random sample and reads off an
  item slightly below (``Minus``) or above (``Plus``) the scaled rank;
* a one-round rank count of the sparse answer that decides which dense
  side to trust.

The max/min step uses a hierarchical Tournament knockout whose guarantee
is ``2 * levels``. That guarantee enters the reported constant ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from advsort.baselines import tournament_groups
from advsort.core import Oracle, Proc, UsageError, drive, parallel
from advsort.netsort import plan_network, round_sort_rows

__all__ = [
    "DenseSide",
    "SparseState",
    "SelectionResult",
    "HUNDRED_SORT_ROUNDS",
    "theory_c",
    "knockout_levels",
    "sparse_sizes",
    "dense_sample_size",
    "dense_index",
    "get_max_proc",
    "get_min_proc",
    "count_proc",
    "sparse_partition_proc",
    "select_sparse_proc",
    "dense_sample_proc",
    "select_combined_proc",
    "get_max",
    "get_min",
    "count",
    "select_sparse",
    "select_dense",
    "select_combined",
    "select_combined_detailed",
]

HUNDRED_SORT_ROUNDS = 100


class DenseSide(str, Enum):
    Minus = "minus"
    Plus = "plus"


def theory_c(r: float = 2.0) -> float:
    """Selection constant for failure probability below ``n^-r``: needs ``c > 90 r``."""
    return 90.0 * r + 1.0


def knockout_levels(d: int) -> int:
    return max(1, math.ceil(math.log2(d))) if d > 1 else 1


def sparse_sizes(n: int, c: float) -> tuple[int, int]:
    """``(subset_size, subsets)`` for the sparse stage."""
    m = min(n, max(2, math.ceil(n ** (1 / 3) - 1e-9)))
    J = max(1, math.ceil(c * n ** (2 / 3) * math.log(n)))
    return m, J


def dense_sample_size(n: int, c: float) -> int:
    return min(n, max(1, math.ceil(c * n ** (5 / 6) * math.log(n))))


def dense_index(n: int, k: int, s: int, c: float, side: DenseSide) -> int:
    """0-based index into the sorted dense sample, clamped to ``[0, s)``.

    The margin vanishes when the sample is all of ``X``: the rank is then
    read directly.
    """
    margin = math.floor(c * n ** (5 / 12) * math.log(n)) if s < n else 0
    centre = math.ceil(k * s / n) - 1
    idx = centre - margin if DenseSide(side) is DenseSide.Minus else centre + margin
    return min(s - 1, max(0, idx))


@dataclass
class SparseState:
    Y: np.ndarray
    L: np.ndarray  # tallies aligned with X
    Z: np.ndarray
    Gamma: np.ndarray
    c: float
    subsets: int
    subset_size: int


@dataclass
class SelectionResult:
    item: int
    branch: str
    K: float
    x_i: int
    x_j: int | None
    c_i: int
    sparse_path: str
    sort_depth: int
    levels: int
    extras: dict = field(default_factory=dict)


# --- max / min / count ------------------------------------------------------


def _knockout(S, d: int, pick_last: bool) -> Proc:
    S = np.asarray(S, dtype=np.int64).reshape(-1)
    if S.size == 0:
        raise UsageError("empty item set")
    levels = knockout_levels(d)
    b = max(2, math.ceil(S.size ** (1 / levels) - 1e-9))
    survivors = S
    for _ in range(levels):
        if survivors.size == 1:
            break
        blocks = np.array_split(survivors, math.ceil(survivors.size / b))
        ordered = yield from tournament_groups(blocks)
        survivors = np.array([o[-1] if pick_last else o[0] for o in ordered], dtype=np.int64)
    # b**levels >= |S| leaves one survivor
    return int(survivors[0])


def get_max_proc(S, d: int) -> Proc:
    return (yield from _knockout(S, d, pick_last=True))


def get_min_proc(S, d: int) -> Proc:
    return (yield from _knockout(S, d, pick_last=False))


def count_proc(X, item: int) -> Proc:
    X = np.asarray(X, dtype=np.int64)
    others = X[X != item]
    winners = yield (others, np.full(others.size, item, dtype=np.int64))
    return int(np.count_nonzero(winners == item))


# --- sparse -------------------------------------------------------------


def _subsets(rng: np.random.Generator, n: int, m: int, J: int) -> np.ndarray:
    return np.stack([rng.choice(n, m, replace=False) for _ in range(J)])


def sparse_partition_proc(X, k: int, d: int, c: float, rng: np.random.Generator) -> Proc:
    """Sampling stage: ``d`` rounds, returns a :class:`SparseState`."""
    X = np.asarray(X, dtype=np.int64)
    n = X.size
    m, J = sparse_sizes(n, c)
    pos = _subsets(rng, n, m, J)  # positions into X
    sorted_pos = yield from round_sort_rows(pos, d)
    # subset positions of the window; rank k scaled to the subset
    centre = math.floor(k * m / n)
    half = math.floor(n ** (1 / 6))
    lo, hi = max(0, centre - half), min(m, centre + half)
    if hi <= lo:
        lo, hi = min(lo, m - 1), min(lo, m - 1) + 1
    candidate = np.zeros(n, dtype=bool)
    candidate[sorted_pos[:, lo:hi].ravel()] = True
    L = np.bincount(sorted_pos[:, :lo].ravel(), minlength=n)
    to_z = ~candidate & (L > (c / 2) * math.log(n))
    return SparseState(
        Y=X[candidate], L=L, Z=X[to_z], Gamma=X[~candidate & ~to_z],
        c=c, subsets=J, subset_size=m,
    )


def _hundred_sort(items) -> Proc:
    items = np.asarray(items, dtype=np.int64)
    if items.size <= 1:
        return items, 0
    net = plan_network(items.size, HUNDRED_SORT_ROUNDS)
    out = yield from round_sort_rows(items[None, :], HUNDRED_SORT_ROUNDS)
    return out[0], net.depth


def select_sparse_proc(X, k: int, d: int, c: float, rng: np.random.Generator) -> Proc:
    """Returns ``(item, path, sort_depth, state)``; ``path`` is ``Z``, ``Y`` or ``Gamma``."""
    state = yield from sparse_partition_proc(X, k, d, c, rng)
    z, y = state.Z.size, state.Y.size
    if k <= z:
        return (yield from get_max_proc(state.Z, d)), "Z", 0, state
    if k <= z + y:
        order, depth = yield from _hundred_sort(state.Y)
        return int(order[k - z - 1]), "Y", depth, state
    return (yield from get_min_proc(state.Gamma, d)), "Gamma", 0, state


# --- dense --------------------------------------------------------------


def dense_sample_proc(X, c: float, rng: np.random.Generator) -> Proc:
    """A 100-round sort of one random sample; returns ``(sorted sample, depth)``."""
    X = np.asarray(X, dtype=np.int64)
    s = dense_sample_size(X.size, c)
    sample = X[rng.choice(X.size, s, replace=False)]
    return (yield from _hundred_sort(sample))


# --- combined -------------------------------------------------------------


def select_combined_proc(X, k: int, d: int, c: float, rng: np.random.Generator) -> Proc:
    X = np.asarray(X, dtype=np.int64)
    n = X.size
    if not 1 <= k <= n:
        raise UsageError(f"rank {k} out of range 1..{n}")
    if d < 1:
        raise UsageError("d must be at least 1")
    levels = knockout_levels(d)
    if n == 1:
        return SelectionResult(int(X[0]), "trivial", 0.0, int(X[0]), None, 0, "trivial", 0, levels)
    r_sparse, r_dense = rng.spawn(2)
    (x_i, path, sparse_depth, state), (dense_sorted, dense_depth) = yield from parallel(
        [select_sparse_proc(X, k, d, c, r_sparse), dense_sample_proc(X, c, r_dense)]
    )
    c_i = yield from count_proc(X, x_i)
    side = DenseSide.Minus if c_i < k else DenseSide.Plus
    x_j = int(dense_sorted[dense_index(n, k, dense_sorted.size, c, side)])
    item = x_i
    if x_j != x_i:
        w = yield (np.array([x_j]), np.array([x_i]))
        # Minus keeps the larger of the two, Plus the smaller
        j_larger = int(w[0]) == x_j
        item = x_j if j_larger == (side is DenseSide.Minus) else x_i
    depth = max(sparse_depth, dense_depth)
    K = max(2.0 * depth, 2.0 * levels) + 2.0
    return SelectionResult(
        item=int(item), branch=side.value, K=K, x_i=int(x_i), x_j=x_j, c_i=c_i,
        sparse_path=path, sort_depth=depth, levels=levels,
        extras={"Z": int(state.Z.size), "Y": int(state.Y.size), "Gamma": int(state.Gamma.size)},
    )


# --- oracle-facing wrappers -------------------------------------------------


def _items(oracle, X):
    return np.arange(oracle.n) if X is None else np.asarray(X, dtype=np.int64)


def _check_rank(k, n):
    if not 1 <= k <= n:
        raise UsageError(f"rank {k} out of range 1..{n}")


def get_max(oracle: Oracle, S=None, d: int = 1) -> int:
    """Knockout maximum with guarantee ``2 * knockout_levels(d)``."""
    return drive(oracle, get_max_proc(_items(oracle, S), d))


def get_min(oracle: Oracle, S=None, d: int = 1) -> int:
    return drive(oracle, get_min_proc(_items(oracle, S), d))


def count(oracle: Oracle, X=None, item: int = 0) -> int:
    """``#{x in X, x != item : x <_c item}`` in one round."""
    X = _items(oracle, X)
    if item not in X:
        raise UsageError(f"item {item} not in X")
    return drive(oracle, count_proc(X, item))


def select_sparse(oracle: Oracle, X=None, k: int = 1, d: int = 1, c: float = 1.0, seed: int = 0) -> int:
    X = _items(oracle, X)
    _check_rank(k, X.size)
    if X.size == 1:
        return int(X[0])
    res = drive(oracle, select_sparse_proc(X, k, d, c, np.random.default_rng(seed)))
    return int(res[0])


def select_dense(oracle: Oracle, X=None, k: int = 1, side: DenseSide | str = DenseSide.Minus,
                 c: float = 1.0, seed: int = 0) -> int:
    X = _items(oracle, X)
    _check_rank(k, X.size)
    if X.size == 1:
        return int(X[0])
    order, _ = drive(oracle, dense_sample_proc(X, c, np.random.default_rng(seed)))
    return int(order[dense_index(X.size, k, order.size, c, DenseSide(side))])


def select_combined_detailed(oracle: Oracle, X=None, k: int = 1, d: int = 1, c: float = 1.0,
                             seed: int = 0) -> SelectionResult:
    return drive(oracle, select_combined_proc(_items(oracle, X), k, d, c, np.random.default_rng(seed)))


def select_combined(oracle: Oracle, X=None, k: int = 1, d: int = 1, c: float = 1.0, seed: int = 0) -> int:
    """A ``K``-approximate ``k``-selection in at most ``d + 102 + levels`` rounds."""
    return select_combined_detailed(oracle, X, k, d, c, seed).item
