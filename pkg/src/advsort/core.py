"""Instances, the adversarial comparison oracle and round accounting.

A comparison between items ``i`` and ``j`` is answered honestly when their
hidden values differ by more than 1, and by an adversary policy otherwise.
Algorithms never see the values; they only see winners.

Algorithms in this package are written as *round procedures*: generators
that yield a batch of pairs ``(left, right)`` and receive the array of
winners back. :func:`drive` runs one procedure against an oracle and
:func:`parallel` interleaves several procedures so that their batches share
rounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Generator, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

if TYPE_CHECKING:
    from advsort.adversaries import AdversaryPolicy

__all__ = [
    "UsageError",
    "Instance",
    "QueryRecord",
    "Transcript",
    "OracleConfig",
    "Oracle",
    "Request",
    "Proc",
    "drive",
    "parallel",
    "honest_winners",
]


class UsageError(ValueError):
    """Raised when an operation is called outside its contract."""


@dataclass(frozen=True)
class Instance:
    """Hidden item values. Item identity is the index ``0..n-1``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64).reshape(-1)
        if vals.size < 1:
            raise UsageError("an instance needs at least one item")
        if not np.all(np.isfinite(vals)):
            raise UsageError("instance values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def sorted_order(self) -> np.ndarray:
        """Item indices by ascending value, ties broken by index."""
        return np.argsort(self.values, kind="stable")

    def sorted_values(self) -> np.ndarray:
        return np.sort(self.values, kind="stable")

    def rank_value(self, rank: int) -> float:
        """Value of the ``rank``-th smallest item (1-based)."""
        if not 1 <= rank <= self.n:
            raise UsageError(f"rank {rank} out of range 1..{self.n}")
        return float(self.sorted_values()[rank - 1])


class QueryRecord(NamedTuple):
    seq: int
    round: int
    left: int
    right: int
    winner: int

    def to_dict(self) -> dict:
        return self._asdict()


class Transcript:
    """Append-only ledger of answered queries, stored as per-round arrays."""

    def __init__(self):
        self._left: list[np.ndarray] = []
        self._right: list[np.ndarray] = []
        self._winner: list[np.ndarray] = []
        self._round: list[int] = []
        self.comparison_count = 0
        self.round_count = 0

    def _append_round(self, left, right, winner):
        self._left.append(np.asarray(left, dtype=np.int64))
        self._right.append(np.asarray(right, dtype=np.int64))
        self._winner.append(np.asarray(winner, dtype=np.int64))
        self._round.append(self.round_count)
        self.comparison_count += len(left)
        self.round_count += 1

    def __len__(self) -> int:
        return self.comparison_count

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(left, right, winner, round)`` arrays over all records in order."""
        if not self._left:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy(), empty.copy()
        rounds = np.concatenate(
            [np.full(len(l), r, dtype=np.int64) for l, r in zip(self._left, self._round)]
        )
        return (
            np.concatenate(self._left),
            np.concatenate(self._right),
            np.concatenate(self._winner),
            rounds,
        )

    @property
    def records(self) -> list[QueryRecord]:
        return list(self)

    def __iter__(self) -> Iterator[QueryRecord]:
        seq = 0
        for l, r, w, rnd in zip(self._left, self._right, self._winner, self._round):
            for a, b, c in zip(l.tolist(), r.tolist(), w.tolist()):
                yield QueryRecord(seq, rnd, a, b, c)
                seq += 1

    def appearances(self, n: int) -> np.ndarray:
        """How often each item occurs in a recorded query."""
        counts = np.zeros(n, dtype=np.int64)
        for l, r in zip(self._left, self._right):
            counts += np.bincount(l, minlength=n)[:n]
            counts += np.bincount(r, minlength=n)[:n]
        return counts

    def write_jsonl(self, fp) -> None:
        """One JSON object per query: ``{seq, round, left, right, winner}``."""
        if isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__"):
            with open(fp, "w", encoding="utf-8") as fh:
                self.write_jsonl(fh)
            return
        for rec in self:
            fp.write(json.dumps(rec.to_dict()) + "\n")

    @staticmethod
    def read_jsonl(fp) -> list[QueryRecord]:
        if isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__"):
            with open(fp, encoding="utf-8") as fh:
                return Transcript.read_jsonl(fh)
        out = []
        for line in fp:
            line = line.strip()
            if line:
                d = json.loads(line)
                out.append(QueryRecord(d["seq"], d["round"], d["left"], d["right"], d["winner"]))
        return out


def honest_winners(values: np.ndarray, left: np.ndarray, right: np.ndarray):
    """Winners for far pairs and the mask of close pairs.

    Entries at close positions (``|x_i - x_j| <= 1``) are left as ``-1``.
    """
    diff = values[left] - values[right]
    close = np.abs(diff) <= 1.0
    winners = np.where(diff > 0, left, right)
    winners[close] = -1
    return winners, close


@dataclass
class OracleConfig:
    policy: "AdversaryPolicy | str" = "honest"
    seed: int = 0
    batch_mode: bool = True


class Oracle:
    """Adversarial comparator with comparison and round accounting.

    ``policy`` may be an :class:`~advsort.adversaries.AdversaryPolicy` or a
    spec string such as ``"pivot-starver:42"``. When ``seed`` is given the
    policy is reset with it.
    """

    def __init__(self, instance, policy="honest", seed=None, batch_mode=True):
        from advsort.adversaries import make_policy

        if not isinstance(instance, Instance):
            instance = Instance(instance)
        self.instance = instance
        self.policy = make_policy(policy) if isinstance(policy, str) else policy
        if seed is not None:
            self.policy.reset(seed)
        self.batch_mode = batch_mode
        self.transcript = Transcript()

    @classmethod
    def from_config(cls, instance, config: OracleConfig) -> "Oracle":
        return cls(instance, config.policy, seed=config.seed, batch_mode=config.batch_mode)

    @property
    def n(self) -> int:
        return self.instance.n

    def _check_indices(self, left, right):
        n = self.instance.n
        if left.size and (left.min() < 0 or right.min() < 0 or left.max() >= n or right.max() >= n):
            raise UsageError(f"item index out of range 0..{n - 1}")

    def _answer(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        # one round; self-pairs are answered with `right` and not recorded
        winners = right.copy()
        if winners.size == 0:
            return winners
        real = left != right
        if not real.all():
            idx = np.flatnonzero(real)
            if idx.size:
                winners[idx] = self._answer(left[idx], right[idx])
            return winners
        hw, close = honest_winners(self.instance.values, left, right)
        policy = self.policy
        policy.begin_round(left, right, self.instance)
        if close.any():
            hw[close] = policy.decide_batch(left[close], right[close], self.instance)
        policy.end_round()
        self.transcript._append_round(left, right, hw)
        return hw

    def compare(self, i: int, j: int) -> int:
        """Winner of a single query; a lone query is its own round."""
        n = self.instance.n
        if not (0 <= i < n and 0 <= j < n):
            raise UsageError(f"item index out of range 0..{n - 1}")
        if i == j:
            return j
        w = self._answer(np.array([i], dtype=np.int64), np.array([j], dtype=np.int64))
        return int(w[0])

    def ask(self, left, right) -> np.ndarray:
        """Answer a batch; one round in batch mode, one round per query otherwise."""
        left = np.asarray(left, dtype=np.int64).reshape(-1)
        right = np.asarray(right, dtype=np.int64).reshape(-1)
        if left.shape != right.shape:
            raise UsageError("left and right must have equal length")
        self._check_indices(left, right)
        if self.batch_mode:
            return self._answer(left, right)
        return np.array([self.compare(a, b) for a, b in zip(left.tolist(), right.tolist())], dtype=np.int64)

    def submit_round(self, pairs: Sequence[tuple[int, int]]) -> list[int]:
        """Answer ``pairs`` under a single round ordinal, in submitted order."""
        if not self.batch_mode:
            raise UsageError("submit_round requires batch_mode")
        if len(pairs) == 0:
            raise UsageError("empty batch")
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return self.ask(arr[:, 0], arr[:, 1]).tolist()

    def snapshot_counts(self) -> tuple[int, int]:
        return self.transcript.comparison_count, self.transcript.round_count


# --- round procedures ----------------------------------------------------

Request = tuple[np.ndarray, np.ndarray]
Proc = Generator[Request, np.ndarray, object]

_EMPTY = np.zeros(0, dtype=np.int64)


def drive(oracle: Oracle, proc: Proc):
    """Run a round procedure to completion and return its result."""
    try:
        left, right = next(proc)
        while True:
            winners = oracle.ask(left, right) if len(left) else _EMPTY
            left, right = proc.send(winners)
    except StopIteration as stop:
        return stop.value


def parallel(procs: Iterable[Proc]) -> Proc:
    """Run procedures side by side, merging their batches into shared rounds.

    Returns the list of results in input order. Answers to a merged batch are
    produced in the order of the procedures, so the adversary sees a
    deterministic serialization.
    """
    procs = list(procs)
    results: list[object] = [None] * len(procs)
    pending: dict[int, Request] = {}

    def step(idx, winners):
        # advance until the procedure asks for something non-empty or finishes
        proc = procs[idx]
        try:
            req = proc.send(winners) if winners is not None else next(proc)
            while len(req[0]) == 0:
                req = proc.send(_EMPTY)
        except StopIteration as stop:
            results[idx] = stop.value
            return
        pending[idx] = req

    for idx in range(len(procs)):
        step(idx, None)
    while pending:
        order = sorted(pending)
        lefts = [pending[i][0] for i in order]
        rights = [pending[i][1] for i in order]
        winners = yield (np.concatenate(lefts), np.concatenate(rights))
        pending.clear()
        start = 0
        for idx, l in zip(order, lefts):
            stop = start + len(l)
            step(idx, winners[start:stop])
            start = stop
    return results
