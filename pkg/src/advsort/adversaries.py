"""Adaptive adversary policies for close pairs.

The oracle consults a policy only for pairs whose values differ by at most 1.
Every policy supports a scalar :meth:`AdversaryPolicy.decide` and a
vectorized :meth:`AdversaryPolicy.decide_batch`; the oracle uses the latter
and brackets each round with :meth:`begin_round` / :meth:`end_round`.
"""

from __future__ import annotations

import numpy as np

from advsort.core import Instance, UsageError

__all__ = [
    "ContractViolation",
    "AdversaryPolicy",
    "Honest",
    "SeededRandom",
    "ReverseClose",
    "CycleForcer",
    "PivotStarver",
    "FixedPattern",
    "POLICIES",
    "make_policy",
]


class ContractViolation(AssertionError):
    """A policy was asked to decide a pair the oracle must answer honestly."""


def _check_close(values, i, j):
    if np.any(np.abs(values[i] - values[j]) > 1.0):
        raise ContractViolation("policy consulted on a far pair")


class AdversaryPolicy:
    kind = "base"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.reset(seed)

    def reset(self, seed: int | None = None) -> None:
        if seed is not None:
            self.seed = int(seed)

    def begin_round(self, left, right, instance: Instance) -> None:
        pass

    def end_round(self) -> None:
        pass

    def decide_batch(self, i: np.ndarray, j: np.ndarray, instance: Instance) -> np.ndarray:
        raise NotImplementedError

    def decide(self, i: int, j: int, transcript=None, instance: Instance | None = None) -> int:
        if instance is None:
            raise UsageError("decide needs the instance")
        w = self.decide_batch(np.array([i]), np.array([j]), instance)
        return int(w[0])

    def spec(self) -> str:
        return f"{self.kind}:{self.seed}"

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed})"


class Honest(AdversaryPolicy):
    """Larger value wins; equal values go to the larger index."""

    kind = "honest"

    def decide_batch(self, i, j, instance):
        v = instance.values
        _check_close(v, i, j)
        vi, vj = v[i], v[j]
        return np.where((vi > vj) | ((vi == vj) & (i > j)), i, j)


class ReverseClose(AdversaryPolicy):
    """Smaller value wins; equal values go to the smaller index."""

    kind = "reverse-close"

    def decide_batch(self, i, j, instance):
        v = instance.values
        _check_close(v, i, j)
        vi, vj = v[i], v[j]
        return np.where((vi < vj) | ((vi == vj) & (i < j)), i, j)


class SeededRandom(AdversaryPolicy):
    kind = "seeded-random"

    def reset(self, seed=None):
        super().reset(seed)
        self._rng = np.random.default_rng(self.seed)

    def decide_batch(self, i, j, instance):
        _check_close(instance.values, i, j)
        coin = self._rng.random(len(i)) < 0.5
        return np.where(coin, i, j)


class CycleForcer(AdversaryPolicy):
    """Rotational preferences inside each cluster of close values.

    Clusters are maximal runs of the sorted values with consecutive gaps of
    at most 1. Inside a cluster of size ``s`` items are numbered by index and
    item ``p`` beats the next ``s // 2`` items cyclically, so any cluster of
    three or more items receives non-transitive answers.
    """

    kind = "cycle-forcer"

    def reset(self, seed=None):
        super().reset(seed)
        self._key = None

    def _layout(self, instance):
        if self._key is not instance:
            v = instance.values
            order = np.argsort(v, kind="stable")
            breaks = np.flatnonzero(np.diff(v[order]) > 1.0) + 1
            cluster = np.zeros(instance.n, dtype=np.int64)
            size = np.zeros(instance.n, dtype=np.int64)
            pos = np.zeros(instance.n, dtype=np.int64)
            for cid, members in enumerate(np.split(order, breaks)):
                members = np.sort(members)
                cluster[members] = cid
                size[members] = len(members)
                pos[members] = np.arange(len(members))
            self._key = instance
            self._layout_cache = (cluster, size, pos)
        return self._layout_cache

    def decide_batch(self, i, j, instance):
        _check_close(instance.values, i, j)
        _, size, pos = self._layout(instance)
        s = size[i]
        ahead = (pos[j] - pos[i]) % s
        half = s // 2
        # on an even cluster the antipodal pair goes to the lower position
        i_wins = (ahead >= 1) & (ahead <= half)
        antipodal = (2 * ahead == s)
        i_wins = np.where(antipodal, pos[i] < pos[j], i_wins)
        return np.where(i_wins, i, j)


class PivotStarver(AdversaryPolicy):
    """The busier item loses; ties go against the lower index.

    Load counts every recorded query an item took part in, including the
    queries of the round being answered (the adversary sees a whole round
    at once).
    """

    kind = "pivot-starver"

    def reset(self, seed=None):
        super().reset(seed)
        self._tally = np.zeros(0, dtype=np.int64)
        self._load = None

    def _grow(self, n):
        if self._tally.size < n:
            self._tally = np.concatenate([self._tally, np.zeros(n - self._tally.size, dtype=np.int64)])

    @property
    def tallies(self) -> np.ndarray:
        return self._tally.copy()

    def begin_round(self, left, right, instance):
        n = instance.n
        self._grow(n)
        self._pending = np.bincount(left, minlength=n) + np.bincount(right, minlength=n)
        self._load = self._tally[:n] + self._pending

    def end_round(self):
        n = self._pending.size
        self._tally[:n] += self._pending
        self._load = None

    def decide_batch(self, i, j, instance):
        _check_close(instance.values, i, j)
        load = self._load
        if load is None:
            self._grow(instance.n)
            load = self._tally[: instance.n] + np.bincount(i, minlength=instance.n) + np.bincount(j, minlength=instance.n)
        li, lj = load[i], load[j]
        i_loses = (li > lj) | ((li == lj) & (i < j))
        return np.where(i_loses, j, i)

    def decide(self, i, j, transcript=None, instance=None):
        if instance is None:
            raise UsageError("decide needs the instance")
        _check_close(instance.values, np.array([i]), np.array([j]))
        if transcript is not None:
            load = transcript.appearances(instance.n)
        else:
            self._grow(instance.n)
            load = self._tally[: instance.n]
        li, lj = load[i], load[j]
        if li > lj or (li == lj and i < j):
            return j
        return i


class FixedPattern(AdversaryPolicy):
    """Answers close pairs from a fixed orientation table.

    ``table[a, b]`` is the winner for the unordered pair ``{a, b}``; used to
    enumerate every consistent adversary on small instances.
    """

    kind = "fixed-pattern"

    def __init__(self, table, seed: int = 0):
        self.table = np.asarray(table, dtype=np.int64)
        super().__init__(seed)

    def decide_batch(self, i, j, instance):
        _check_close(instance.values, i, j)
        return self.table[i, j]

    @classmethod
    def from_bits(cls, close_pairs, bits: int, n: int) -> "FixedPattern":
        """Bit ``t`` set means the larger index of ``close_pairs[t]`` wins."""
        table = np.zeros((n, n), dtype=np.int64)
        for t, (a, b) in enumerate(close_pairs):
            lo, hi = min(a, b), max(a, b)
            w = hi if (bits >> t) & 1 else lo
            table[a, b] = table[b, a] = w
        return cls(table)


POLICIES = {
    cls.kind: cls for cls in (Honest, SeededRandom, ReverseClose, CycleForcer, PivotStarver)
}


def make_policy(spec: str | AdversaryPolicy) -> AdversaryPolicy:
    """Build a policy from ``"name"`` or ``"name:seed"``, e.g. ``"pivot-starver:42"``."""
    if isinstance(spec, AdversaryPolicy):
        return spec
    name, _, seed = spec.strip().partition(":")
    name = name.strip().lower().replace("_", "-")
    if name not in POLICIES:
        raise UsageError(f"unknown policy {name!r}; valid: {', '.join(sorted(POLICIES))}")
    return POLICIES[name](int(seed) if seed else 0)
