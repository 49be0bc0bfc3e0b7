"""Round-robin Tournament and naive quicksort/quickselect.

Tournament compares every pair of a group in one round and orders the group
by ascending number of wins (ties by item index). It is 2-approximate under
any adversary, which makes it the workhorse of the other algorithms.
Quicksort and quickselect are the classic random-pivot versions; their output
is always 2-approximate but an adaptive adversary controls their cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from advsort.core import Oracle, Proc, UsageError, drive, parallel

__all__ = [
    "WinTable",
    "round_robin_rows",
    "tournament_rows",
    "tournament_groups",
    "tournament_proc",
    "tournament_wins",
    "tournament_order",
    "tournament_max",
    "tournament_min",
    "quicksort_proc",
    "quickselect_proc",
    "naive_quicksort",
    "naive_quickselect",
]


@dataclass(frozen=True)
class WinTable:
    items: np.ndarray
    wins: np.ndarray

    @property
    def comparisons(self) -> int:
        g = len(self.items)
        return g * (g - 1) // 2


@lru_cache(maxsize=None)
def _pair_index(g: int):
    a, b = np.triu_indices(g, 1)
    return a.astype(np.int64), b.astype(np.int64)


def round_robin_rows(groups: np.ndarray) -> Proc:
    """All pairs within each row of a ``(G, g)`` matrix; returns the wins matrix."""
    groups = np.asarray(groups, dtype=np.int64)
    G, g = groups.shape
    if g < 2 or G == 0:
        return np.zeros((G, g), dtype=np.int64)
    a, b = _pair_index(g)
    left = groups[:, a]
    winners = yield (left.ravel(), groups[:, b].ravel())
    winners = np.asarray(winners).reshape(G, -1)
    win_pos = np.where(winners == left, a, b)
    flat = (np.arange(G)[:, None] * g + win_pos).ravel()
    return np.bincount(flat, minlength=G * g).reshape(G, g)


def tournament_rows(groups: np.ndarray) -> Proc:
    """Tournament-sort every row of a ``(G, g)`` matrix in one shared round."""
    groups = np.asarray(groups, dtype=np.int64)
    wins = yield from round_robin_rows(groups)
    idx = np.lexsort((groups, wins), axis=-1)
    return np.take_along_axis(groups, idx, axis=-1)


def tournament_groups(groups) -> Proc:
    """Tournament-sort groups of mixed sizes in one shared round."""
    groups = [np.asarray(g, dtype=np.int64) for g in groups]
    by_size: dict[int, list[int]] = {}
    for idx, g in enumerate(groups):
        by_size.setdefault(len(g), []).append(idx)
    sizes = sorted(by_size)
    mats = [np.stack([groups[i] for i in by_size[s]]) if s else np.zeros((len(by_size[s]), 0), np.int64) for s in sizes]
    sorted_mats = yield from parallel(tournament_rows(m) for m in mats)
    out: list[np.ndarray] = [None] * len(groups)  # type: ignore[list-item]
    for s, mat in zip(sizes, sorted_mats):
        for row, idx in zip(mat, by_size[s]):
            out[idx] = row
    return out


def tournament_proc(items) -> Proc:
    items = np.asarray(items, dtype=np.int64).reshape(-1)
    if np.unique(items).size != items.size:
        raise UsageError("tournament items must be distinct")
    out = yield from tournament_rows(items[None, :])
    return out[0]


def tournament_wins(oracle: Oracle, items=None) -> WinTable:
    items = np.arange(oracle.n) if items is None else np.asarray(items, dtype=np.int64)
    if np.unique(items).size != items.size:
        raise UsageError("tournament items must be distinct")
    wins = drive(oracle, round_robin_rows(items[None, :]))
    return WinTable(items, wins[0])


def tournament_order(oracle: Oracle, items=None) -> np.ndarray:
    """Items by ascending wins, ties by ascending index; one round."""
    items = np.arange(oracle.n) if items is None else items
    return drive(oracle, tournament_proc(items))


def tournament_max(oracle: Oracle, items=None) -> int:
    """Most wins, ties to the larger index. Within 2 of the true maximum."""
    items = np.arange(oracle.n) if items is None else np.asarray(items, dtype=np.int64)
    if len(items) == 0:
        raise UsageError("empty item set")
    return int(tournament_order(oracle, items)[-1])


def tournament_min(oracle: Oracle, items=None) -> int:
    items = np.arange(oracle.n) if items is None else np.asarray(items, dtype=np.int64)
    if len(items) == 0:
        raise UsageError("empty item set")
    return int(tournament_order(oracle, items)[0])


def _split(arr, pivot, winners):
    lower = winners == pivot
    return arr[lower], arr[~lower]


def quicksort_proc(items, rng: np.random.Generator) -> Proc:
    """Random-pivot quicksort; each partition is one round, done depth-first."""
    out: list[int] = []
    stack: list[tuple[bool, object]] = [(True, np.asarray(items, dtype=np.int64))]
    while stack:
        is_segment, obj = stack.pop()
        if not is_segment:
            out.append(obj)
            continue
        arr = obj
        if arr.size == 0:
            continue
        if arr.size == 1:
            out.append(int(arr[0]))
            continue
        p = int(arr[rng.integers(arr.size)])
        rest = arr[arr != p]
        winners = yield (rest, np.full(rest.size, p, dtype=np.int64))
        smaller, larger = _split(rest, p, winners)
        stack.append((True, larger))
        stack.append((False, p))
        stack.append((True, smaller))
    return np.array(out, dtype=np.int64)


def quickselect_proc(items, rank: int, rng: np.random.Generator) -> Proc:
    arr = np.asarray(items, dtype=np.int64)
    if not 1 <= rank <= arr.size:
        raise UsageError(f"rank {rank} out of range 1..{arr.size}")
    while arr.size > 1:
        p = int(arr[rng.integers(arr.size)])
        rest = arr[arr != p]
        winners = yield (rest, np.full(rest.size, p, dtype=np.int64))
        smaller, larger = _split(rest, p, winners)
        if rank <= smaller.size:
            arr = smaller
        elif rank == smaller.size + 1:
            return p
        else:
            rank -= smaller.size + 1
            arr = larger
    return int(arr[0])


def naive_quicksort(oracle: Oracle, items=None, seed: int = 0) -> np.ndarray:
    items = np.arange(oracle.n) if items is None else items
    return drive(oracle, quicksort_proc(items, np.random.default_rng(seed)))


def naive_quickselect(oracle: Oracle, items=None, rank: int = 1, seed: int = 0) -> int:
    items = np.arange(oracle.n) if items is None else items
    return int(drive(oracle, quickselect_proc(items, rank, np.random.default_rng(seed))))
