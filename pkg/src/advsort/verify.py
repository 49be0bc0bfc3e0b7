"""Ground-truth verifiers for approximate sorting and selection.

These functions read hidden values directly and are never used by the
algorithms themselves. All comparisons are exact floating comparisons.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass, fields
from functools import lru_cache

import numpy as np

from advsort.core import Instance, UsageError

__all__ = [
    "ApproxReport",
    "realized_sort_error",
    "realized_sort_error_rows",
    "selection_error",
    "is_k_approx_selection",
    "selection_check_bruteforce",
    "sorted_distance",
    "gap_partition_respected",
    "empty_bands",
    "partition_gap",
    "left_density",
    "right_density",
]


def _values(instance):
    return instance.values if isinstance(instance, Instance) else np.asarray(instance, dtype=float)


def _check_permutation(order, n):
    order = np.asarray(order, dtype=np.int64).reshape(-1)
    if order.size != n or not np.array_equal(np.sort(order), np.arange(n)):
        raise UsageError("order is not a permutation of 0..n-1")
    return order


def realized_sort_error(instance, order) -> float:
    """Smallest ``k`` for which ``order`` is a k-approximate sorting.

    The maximum of ``values[p] - values[q]`` over pairs with ``p`` placed
    before ``q``; 0 when nothing is inverted.
    """
    v = _values(instance)
    order = _check_permutation(order, v.size)
    seq = v[order]
    if seq.size < 2:
        return 0.0
    prefix_max = np.maximum.accumulate(seq)[:-1]
    return float(max(0.0, np.max(prefix_max - seq[1:])))


def realized_sort_error_rows(values, orders) -> np.ndarray:
    """Row-wise :func:`realized_sort_error` for a 2-D array of orders (no checks)."""
    seq = np.asarray(values, dtype=float)[np.asarray(orders)]
    if seq.shape[-1] < 2:
        return np.zeros(seq.shape[:-1])
    prefix_max = np.maximum.accumulate(seq, axis=-1)[..., :-1]
    return np.maximum(0.0, np.max(prefix_max - seq[..., 1:], axis=-1))


def selection_error(instance, rank: int, item: int) -> float:
    """``|values[item] - s_rank|`` where ``s_rank`` is the rank-th smallest (1-based)."""
    v = _values(instance)
    if not 1 <= rank <= v.size:
        raise UsageError(f"rank {rank} out of range 1..{v.size}")
    if not 0 <= item < v.size:
        raise UsageError(f"item {item} out of range")
    s = np.sort(v, kind="stable")[rank - 1]
    return float(abs(v[item] - s))


def is_k_approx_selection(instance, i: int, item: int, k: float) -> bool:
    return selection_error(instance, i, item) <= k


@lru_cache(maxsize=16)
def _permutations(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


@lru_cache(maxsize=4096)
def _min_error_table(values: tuple) -> np.ndarray:
    # table[pos, item] = least realized error over orders placing item at pos
    perms = _permutations(len(values))
    errs = realized_sort_error_rows(np.array(values), perms)
    n = len(values)
    table = np.full((n, n), np.inf)
    for pos in range(n):
        np.minimum.at(table[pos], perms[:, pos], errs)
    return table


def selection_check_bruteforce(instance, i: int, item: int, k: float) -> bool:
    """Exhaustive check: does some k-approximate sorting put ``item`` at rank ``i``?"""
    v = _values(instance)
    n = v.size
    if n > 8:
        raise UsageError("brute force is limited to n <= 8")
    if not 1 <= i <= n:
        raise UsageError(f"rank {i} out of range 1..{n}")
    table = _min_error_table(tuple(float(x) for x in v))
    return bool(table[i - 1, item] <= k)


def sorted_distance(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.size != b.size:
        raise UsageError("arrays must have equal length")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.sort(a) - np.sort(b))))


def empty_bands(instance) -> list[float]:
    """Values ``y`` such that ``[y, y+1)`` is empty and splits the items.

    One ``y`` per consecutive sorted gap strictly wider than 1, centred in
    the gap.
    """
    s = np.sort(_values(instance))
    gaps = np.diff(s)
    idx = np.flatnonzero(gaps > 1.0)
    return [float(s[t] + (gaps[t] - 1.0) / 2.0) for t in idx]


def gap_partition_respected(instance, order, y: float) -> bool:
    """Everything below ``y`` precedes everything above it in ``order``."""
    v = _values(instance)
    if np.any((v >= y) & (v < y + 1.0)):
        raise UsageError(f"band [{y}, {y + 1}) is not empty")
    order = _check_permutation(order, v.size)
    below = v[order] < y
    # once an item above the band appears, nothing below may follow
    first_above = np.argmin(below) if not below.all() else below.size
    return bool(not below[first_above:].any())


def partition_gap(instance, low, high) -> float:
    """Least ``k`` with ``high >=_k low``: ``max(low) - min(high)``, floored at 0."""
    v = _values(instance)
    low = np.asarray(low, dtype=np.int64)
    high = np.asarray(high, dtype=np.int64)
    if low.size == 0 or high.size == 0:
        return 0.0
    return float(max(0.0, v[low].max() - v[high].min()))


def left_density(instance, k: int) -> int:
    """``|{x : s_k - 1 <= x <= s_k}|``."""
    v = _values(instance)
    s = np.sort(v)[k - 1]
    return int(np.count_nonzero((v >= s - 1.0) & (v <= s)))


def right_density(instance, k: int) -> int:
    """``|{x : s_k <= x <= s_k + 1}|``."""
    v = _values(instance)
    s = np.sort(v)[k - 1]
    return int(np.count_nonzero((v >= s) & (v <= s + 1.0)))


@dataclass
class ApproxReport:
    """Per-trial verdict. ``passed`` is recomputed from ground truth."""

    realized_k: float
    claimed_k: float
    comparisons: int
    rounds: int
    passed: bool = False

    def __post_init__(self):
        if self.realized_k < 0:
            raise UsageError("realized_k must be non-negative")
        self.passed = bool(self.realized_k <= self.claimed_k)

    @classmethod
    def for_order(cls, instance, order, claimed_k, oracle=None) -> "ApproxReport":
        c, r = oracle.snapshot_counts() if oracle is not None else (0, 0)
        return cls(realized_sort_error(instance, order), float(claimed_k), c, r)

    @classmethod
    def for_selection(cls, instance, rank, item, claimed_k, oracle=None) -> "ApproxReport":
        c, r = oracle.snapshot_counts() if oracle is not None else (0, 0)
        return cls(selection_error(instance, rank, item), float(claimed_k), c, r)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(self.to_dict().values())
        return buf.getvalue()

    @staticmethod
    def csv_header() -> str:
        names = [f.name if f.name != "passed" else "pass" for f in fields(ApproxReport)]
        return ",".join(names) + "\n"
