"""Randomized 4-approximate sorting and selection.

Each call splits its items into a lower part ``Y`` and an upper part ``Ybar``
with both sides holding at least ``floor(n/8)`` items, then recurses. The
split is found by up to three phases:

1. pivot phase: random pivots, keep the first balanced split;
2. sample phase (only if every pivot failed): estimate each item's rank
   against random samples and keep the apparently small ones;
3. shifting phase: top up the smaller side with the Tournament-smallest
   seventh of random windows (or trim the larger side symmetrically).

Sibling calls run side by side, so their rounds are shared and the round
count grows with the recursion depth, not with the number of calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from advsort.baselines import tournament_groups, tournament_proc
from advsort.core import Oracle, Proc, UsageError, drive, parallel

__all__ = [
    "Side",
    "RSortParams",
    "Partition",
    "pivot_phase_proc",
    "sample_phase_proc",
    "shifting_phase_proc",
    "partition_proc",
    "rsort_proc",
    "rselect_proc",
    "pivot_phase",
    "sample_phase",
    "shifting_phase",
    "rsort",
    "rselect",
]


class Side(str, Enum):
    Left = "left"
    Right = "right"


@dataclass(frozen=True)
class RSortParams:
    """Phase constants. The defaults are desk-scale; see :meth:`theory`."""

    c1: float = 2.0
    c2: float = 2.0
    c3: float = 2.0
    r: float = 2.0
    base_case: int = 32
    seed: int = 0
    N: int | None = None

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3, self.r) <= 0:
            raise UsageError("c1, c2, c3 and r must be positive")
        if self.base_case < 2:
            raise UsageError("base_case must be at least 2")

    @classmethod
    def theory(cls, r: float = 2.0, **kw) -> "RSortParams":
        """Constants for which the union bounds hold: failure below ``N^-r``."""
        return cls(c1=21 * r, c2=3 * (r + 1), c3=14 * (r + 1) / 9, r=r, **kw)

    def with_N(self, N: int) -> "RSortParams":
        return self if self.N is not None else replace(self, N=N)

    @property
    def _lnN(self) -> float:
        return math.log(self.N) if self.N and self.N > 1 else 0.0

    @property
    def pivot_trials(self) -> int:
        return max(1, math.ceil(8 * self.c1 * self._lnN))

    @property
    def samples(self) -> int:
        return max(1, math.ceil(8 * self.c2 * self._lnN))

    @property
    def sample_threshold(self) -> float:
        return 2 * self.c2 * self._lnN

    @property
    def block(self) -> int:
        return max(1, math.ceil(4 * self.c3 * self._lnN))


@dataclass
class Partition:
    """A split of one call's items with the bookkeeping of how it was found."""

    Y: np.ndarray
    Ybar: np.ndarray
    phase_used: str
    L: int = 0
    R: int = 0
    side: str | None = None
    depth: int = 0

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "n": int(len(self.Y) + len(self.Ybar)),
            "phase": self.phase_used,
            "L": self.L,
            "R": self.R,
            "side": self.side,
            "Y": [int(x) for x in self.Y],
            "Ybar": [int(x) for x in self.Ybar],
        }


def _min_side(n: int) -> int:
    # floor(n/8), but never 0 so both sides stay non-empty
    return max(1, n // 8)


def pivot_phase_proc(X, params: RSortParams, rng: np.random.Generator) -> Proc:
    """Returns a :class:`Partition` on success, else the counters ``(L, R)``.

    Trials are issued in batches of 1, 2, 4, ... per round; the first
    successful trial in issue order wins, exactly as if run one by one.
    """
    X = np.asarray(X, dtype=np.int64)
    n = X.size
    need = _min_side(n)
    trials = params.pivot_trials
    L = R = done = 0
    batch = 1
    while done < trials:
        b = min(batch, trials - done)
        pivots = X[rng.integers(n, size=b)]
        left = np.tile(X, b)
        right = np.repeat(pivots, n)
        real = left != right
        winners = yield (left[real], right[real])
        answered = np.full(b * n, -1, dtype=np.int64)
        answered[real] = winners
        in_y = answered.reshape(b, n) == pivots[:, None]
        for t in range(b):
            y = int(in_y[t].sum())
            if min(y, n - y) >= need:
                return Partition(X[in_y[t]], X[~in_y[t]], "pivot", L, R)
            if y < need:
                L += 1
            else:
                R += 1
        done += b
        batch *= 2
    return L, R


def sample_phase_proc(X, params: RSortParams, rng: np.random.Generator, side: Side = Side.Left) -> Proc:
    """Items whose sampled rank looks small (``Left``), or the mirror (``Right``).

    Returns ``Y``. Samples are drawn with replacement; drawing the item
    itself costs nothing and never counts.
    """
    X = np.asarray(X, dtype=np.int64)
    n = X.size
    s = params.samples
    z = X[rng.integers(n, size=n * s)]
    xi = np.repeat(X, s)
    real = z != xi
    winners = yield (z[real], xi[real])
    hit = np.zeros(n * s, dtype=bool)
    if Side(side) is Side.Left:
        hit[real] = winners == xi[real]  # z <_c x_i
    else:
        hit[real] = winners == z[real]  # z >_c x_i
    low_count = hit.reshape(n, s).sum(axis=1) < params.sample_threshold
    return X[low_count] if Side(side) is Side.Left else X[~low_count]


def _windows(P: np.ndarray, B: int, deficit: int):
    # consecutive windows of 7B items; a short last window moves ceil(w/7)
    out = []
    i = 0
    while deficit > 0 and i < P.size:
        w = P[i:i + 7 * B]
        take = B if w.size == 7 * B else math.ceil(w.size / 7)
        out.append((w, take))
        deficit -= take
        i += w.size
    return out


def shifting_phase_proc(X, Y, params: RSortParams, rng: np.random.Generator) -> Proc:
    """Rebalance ``Y`` so both sides hold at least ``floor(n/8)`` items.

    All windows are Tournament-sorted in a single round: their number is
    fixed in advance because each full window moves exactly ``B`` items.
    """
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    n = X.size
    need = _min_side(n)
    B = params.block
    in_y = np.isin(X, Y)
    ysize = int(in_y.sum())
    if ysize < need and ysize <= n - ysize:
        P = rng.permutation(X[~in_y])
        wins = _windows(P, B, need - ysize)
        ordered = yield from tournament_groups([w for w, _ in wins])
        moved = [o[:take] for o, (_, take) in zip(ordered, wins)]
        if moved:
            in_y |= np.isin(X, np.concatenate(moved))
    elif n - ysize < need:
        P = rng.permutation(X[in_y])
        wins = _windows(P, B, need - (n - ysize))
        ordered = yield from tournament_groups([w for w, _ in wins])
        moved = [o[o.size - take:] for o, (_, take) in zip(ordered, wins)]
        if moved:
            in_y &= ~np.isin(X, np.concatenate(moved))
    return Partition(X[in_y], X[~in_y], "sample-shift")


def partition_proc(X, params: RSortParams, rng: np.random.Generator) -> Proc:
    res = yield from pivot_phase_proc(X, params, rng)
    if isinstance(res, Partition):
        return res
    L, R = res
    side = Side.Left if L >= R else Side.Right
    Y = yield from sample_phase_proc(X, params, rng, side)
    part = yield from shifting_phase_proc(X, Y, params, rng)
    part.L, part.R, part.side = L, R, side.value
    return part


def rsort_proc(X, params: RSortParams, rng: np.random.Generator, certificates=None, depth: int = 0) -> Proc:
    X = np.asarray(X, dtype=np.int64)
    if X.size <= params.base_case:
        return (yield from tournament_proc(X))
    part = yield from partition_proc(X, params, rng)
    part.depth = depth
    if certificates is not None:
        certificates.append(part)
    low, high = yield from parallel(
        [
            rsort_proc(part.Y, params, rng, certificates, depth + 1),
            rsort_proc(part.Ybar, params, rng, certificates, depth + 1),
        ]
    )
    return np.concatenate([low, high])


def rselect_proc(X, rank: int, params: RSortParams, rng: np.random.Generator, certificates=None) -> Proc:
    X = np.asarray(X, dtype=np.int64)
    if not 1 <= rank <= X.size:
        raise UsageError(f"rank {rank} out of range 1..{X.size}")
    depth = 0
    while X.size > params.base_case:
        part = yield from partition_proc(X, params, rng)
        part.depth = depth
        if certificates is not None:
            certificates.append(part)
        if rank <= part.Y.size:
            X = part.Y
        else:
            rank -= part.Y.size
            X = part.Ybar
        depth += 1
    order = yield from tournament_proc(X)
    return int(order[rank - 1])


def _setup(oracle, X, params):
    X = np.arange(oracle.n) if X is None else np.asarray(X, dtype=np.int64)
    params = (params or RSortParams()).with_N(max(1, X.size))
    return X, params, np.random.default_rng(params.seed)


def pivot_phase(oracle: Oracle, X=None, params: RSortParams | None = None):
    X, params, rng = _setup(oracle, X, params)
    return drive(oracle, pivot_phase_proc(X, params, rng))


def sample_phase(oracle: Oracle, X=None, params: RSortParams | None = None, side: Side | str = Side.Left):
    X, params, rng = _setup(oracle, X, params)
    return drive(oracle, sample_phase_proc(X, params, rng, Side(side)))


def shifting_phase(oracle: Oracle, X, Y, params: RSortParams | None = None) -> Partition:
    X, params, rng = _setup(oracle, X, params)
    return drive(oracle, shifting_phase_proc(X, Y, params, rng))


def rsort(oracle: Oracle, X=None, params: RSortParams | None = None, certificates: list | None = None) -> np.ndarray:
    """4-approximate sorting with high probability; appends partitions to ``certificates``."""
    X, params, rng = _setup(oracle, X, params)
    return drive(oracle, rsort_proc(X, params, rng, certificates))


def rselect(oracle: Oracle, X=None, rank: int = 1, params: RSortParams | None = None,
            certificates: list | None = None) -> int:
    X, params, rng = _setup(oracle, X, params)
    return drive(oracle, rselect_proc(X, rank, params, rng, certificates))
