"""Arity-m sorting networks run with Tournament as the group oracle.

A network is a list of layers; each layer holds disjoint groups of
positions, and a group is an ordered tuple: its occupants are sorted and
written back in that order. Running a depth-``d`` network with Tournament
costs ``d`` rounds and yields a ``2d``-approximate sorting.

Two constructions are provided, both built on a power-of-two width and then
trimmed to the requested width (see :func:`_trim`):

``KWayOddEven``
    Batcher's odd-even merge sort for ``m < 4``. For ``m >= 4`` the bitonic
    merger is run ``j = floor(log2 m)`` levels at a time: the block is viewed
    as a ``2^j``-row matrix and each column is one group, then each row is
    merged recursively. Depth ``1 + sum_{s=j+1}^{p} ceil(s/j)``.

``RecursiveMerge``
    Sort blocks of ``2^e <= m`` positions, then repeatedly merge ``k`` sorted
    runs. A ``k``-way merge splits every run into ``C`` interleaved columns,
    merges the columns recursively and finishes with two overlapping layers
    of ``2k``-row windows that clean the at most ``k`` unsorted rows left
    behind. Depth ``O(log_m^2 n)``; needs ``m >= 8`` and otherwise falls back
    to the grouped bitonic construction.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from advsort.baselines import tournament_rows
from advsort.core import Oracle, Proc, UsageError, drive, parallel

__all__ = [
    "Scheme",
    "SortingNetwork",
    "build_network",
    "plan_network",
    "zero_one_check",
    "apply_exact",
    "run_network_rows",
    "run_network",
    "round_sort_rows",
    "round_sort",
    "RoundSortResult",
    "sorting_arity",
]


class Scheme(str, Enum):
    KWayOddEven = "KWayOddEven"
    RecursiveMerge = "RecursiveMerge"


Layer = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SortingNetwork:
    n: int
    m: int
    layers: tuple[Layer, ...]
    scheme: str = ""

    def __post_init__(self):
        for layer in self.layers:
            if not layer:
                continue
            if max(map(len, layer)) > self.m:
                raise UsageError(f"group exceeds arity {self.m}")
            flat = np.fromiter(itertools.chain.from_iterable(layer), dtype=np.int64)
            if flat.size and (flat.min() < 0 or flat.max() >= self.n or np.unique(flat).size != flat.size):
                raise UsageError("groups in a layer must be disjoint subsets of 0..n-1")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def rounds(self) -> tuple[Layer, ...]:
        return self.layers

    @cached_property
    def _buckets(self):
        # per layer: list of (g, positions matrix) grouped by group size
        out = []
        for layer in self.layers:
            by_size: dict[int, list] = {}
            for grp in layer:
                if len(grp) >= 2:
                    by_size.setdefault(len(grp), []).append(grp)
            out.append([np.array(gs, dtype=np.int64) for _, gs in sorted(by_size.items())])
        return out

    def max_comparisons(self) -> int:
        return sum(len(g) * (len(g) - 1) // 2 for layer in self.layers for g in layer)

    def to_text(self) -> str:
        lines = [f"# n={self.n} m={self.m} scheme={self.scheme or '-'} depth={self.depth}"]
        for r, layer in enumerate(self.layers):
            for g in layer:
                lines.append(f"{r}: " + " ".join(map(str, g)))
            if not layer:
                lines.append(f"{r}:")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SortingNetwork":
        header = re.match(r"#\s*n=(\d+)\s+m=(\d+)\s+scheme=(\S+)(?:\s+depth=(\d+))?", text.lstrip())
        if not header:
            raise UsageError("missing network header line")
        n, m, scheme = int(header.group(1)), int(header.group(2)), header.group(3)
        depth = int(header.group(4)) if header.group(4) else 0
        layers: list[list[tuple[int, ...]]] = [[] for _ in range(depth)]
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            r, _, rest = line.partition(":")
            r = int(r)
            while len(layers) <= r:
                layers.append([])
            if rest.strip():
                layers[r].append(tuple(int(t) for t in rest.split()))
        return cls(n, m, tuple(tuple(l) for l in layers), "" if scheme == "-" else scheme)


# --- constructions on power-of-two widths ----------------------------------


def _batcher(N: int) -> list[list[tuple[int, ...]]]:
    layers = []
    p = 1
    while p < N:
        k = p
        while k >= 1:
            layer = []
            for j in range(k % p, N - k, 2 * k):
                for i in range(min(k, N - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        layer.append((i + j, i + j + k))
            layers.append(layer)
            k //= 2
        p *= 2
    return layers


def _grouped_bitonic(p: int, j: int) -> list[np.ndarray]:
    # every layer has groups of one size, so each is a (groups, size) matrix
    N = 1 << p
    if p <= j:
        return [np.arange(N)[None, :]]
    size = 1 << j
    first = np.arange(N).reshape(-1, size)
    first[1::2] = first[1::2, ::-1]
    layers = [first]
    for s in range(j + 1, p + 1):
        hi = s - 1
        while hi >= 0:
            lo = max(0, hi - j + 1)
            width = hi - lo + 1
            bases = np.arange(N)
            bases = bases[(bases & (((1 << width) - 1) << lo)) == 0]
            grp = bases[:, None] + (np.arange(1 << width) << lo)[None, :]
            desc = ((bases >> s) & 1) == 1
            grp[desc] = grp[desc, ::-1]
            layers.append(grp)
            hi = lo - 1
    return layers


def _merge_depth(k: int, L: int, m: int, C: int) -> int:
    depth = 1
    while k * L > m:
        L //= C
        depth += 2
    return depth


def _kway_merge(P: list[int], k: int, L: int, m: int, C: int) -> list[list[tuple[int, ...]]]:
    # P holds k consecutive sorted runs of length L
    if k * L <= m:
        return [[tuple(P)]]
    sub = [_kway_merge(P[c::C], k, L // C, m, C) for c in range(C)]
    layers = [sum((s[d] for s in sub), []) for d in range(len(sub[0]))]
    rows = k * L // C
    span = 2 * k * C
    tiling_a = [tuple(P[t:t + span]) for t in range(0, rows * C, span)]
    tiling_b = [tuple(P[t:t + span]) for t in range(k * C, rows * C, span)]
    layers.append([g for g in tiling_a if len(g) > 1])
    layers.append([g for g in tiling_b if len(g) > 1])
    return layers


def _recursive_merge_plan(p: int, m: int):
    """Best ``(depth, e, a, c)`` over run-count and column-count exponents."""
    e = int(math.floor(math.log2(m)))
    best = None
    for a in range(1, e):
        for c in range(1, e):
            if (1 << (a + 1 + c)) > m:
                continue
            depth = 1
            run = e
            while run < p:
                step = min(a, p - run)
                depth += _merge_depth(1 << step, 1 << run, m, 1 << c)
                run += step
            if best is None or depth < best[0]:
                best = (depth, e, a, c)
    return best


def _recursive_merge(p: int, m: int) -> list[list[tuple[int, ...]]]:
    N = 1 << p
    _, e, a, c = _recursive_merge_plan(p, m)
    if p <= e:
        return [[tuple(range(N))]]
    layers = [[tuple(range(b, b + (1 << e))) for b in range(0, N, 1 << e)]]
    run = e
    while run < p:
        step = min(a, p - run)
        k, L = 1 << step, 1 << run
        per_block = [_kway_merge(list(range(b, b + k * L)), k, L, m, 1 << c) for b in range(0, N, k * L)]
        for d in range(len(per_block[0])):
            layers.append(sum((blk[d] for blk in per_block), []))
        run += step
    return layers


def _bucket(layer) -> list[np.ndarray]:
    if isinstance(layer, np.ndarray):
        return [layer]
    by_size: dict[int, list] = {}
    for grp in layer:
        by_size.setdefault(len(grp), []).append(grp)
    return [np.array(gs, dtype=np.int64) for _, gs in sorted(by_size.items())]


@lru_cache(maxsize=64)
def _raw_network(p: int, m: int, scheme: Scheme) -> tuple[list[np.ndarray], ...]:
    """Untrimmed width-``2^p`` layers, bucketed by group size."""
    if scheme is Scheme.RecursiveMerge and _recursive_merge_plan(p, m) is not None:
        raw = _recursive_merge(p, m)
    elif m < 4:
        raw = _batcher(1 << p)
    else:
        raw = _grouped_bitonic(p, int(math.floor(math.log2(m))))
    return tuple(_bucket(layer) for layer in raw if len(layer))


def _trim(raw, N: int, n: int) -> list[Layer]:
    """Restrict a width-``N`` network to its first ``n`` inputs.

    Positions ``n..N-1`` are treated as +infinity. Where those sentinels sit
    after every layer does not depend on the data (a group always sends its
    sentinels to its last entries), so the real items can be tracked through
    slot ids and the network rewritten on exactly ``n`` wires.
    """
    slot = np.arange(N, dtype=np.int64)
    real = slot < n
    kept: list[list[np.ndarray]] = []
    for layer in raw:
        mats = []
        for P in layer:
            g = P.shape[1]
            here = real[P]
            ids = np.sort(np.where(here, slot[P], N), axis=1)
            cnt = here.sum(axis=1)
            now_real = np.arange(g)[None, :] < cnt[:, None]
            real[P] = now_real
            slot[P] = np.where(now_real, ids, N)
            for c in np.unique(cnt[cnt >= 2]):
                mats.append(ids[cnt == c, :c])
        if mats:
            kept.append(mats)
    if not real[:n].all():
        raise AssertionError("trimmed network leaves a sentinel inside the output")
    where = np.empty(N + 1, dtype=np.int64)
    where[slot[:n]] = np.arange(n)
    return [
        tuple(tuple(g) for mat in mats for g in where[mat].tolist())
        for mats in kept
    ]


@lru_cache(maxsize=256)
def build_network(n: int, m: int, scheme: Scheme | str = Scheme.KWayOddEven) -> SortingNetwork:
    """A valid arity-``m`` sorting network of width ``n``."""
    scheme = Scheme(scheme)
    if m < 2:
        raise UsageError("arity must be at least 2")
    if n < 1:
        raise UsageError("width must be at least 1")
    m = min(m, n) if n >= 2 else m
    if n == 1:
        return SortingNetwork(1, m, (), scheme.value)
    if n <= m:
        return SortingNetwork(n, m, ((tuple(range(n)),),), scheme.value)
    p = (n - 1).bit_length()
    layers = _trim(_raw_network(p, m, scheme), 1 << p, n)
    return SortingNetwork(n, m, tuple(layers), scheme.value)


def zero_one_check(network: SortingNetwork) -> bool:
    """Exhaustively run all ``2^n`` 0-1 inputs under exact comparison."""
    n = network.n
    if n > 20:
        raise UsageError("exhaustive 0-1 check limited to n <= 20")
    inputs = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int8)
    out = apply_exact(network, inputs)
    return bool(np.all(np.diff(out, axis=-1) >= 0))


def apply_exact(network: SortingNetwork, values) -> np.ndarray:
    """Run the network with a perfect comparator (rows of ``values`` independently)."""
    arr = np.array(values, copy=True)
    for layer in network.layers:
        for grp in layer:
            idx = list(grp)
            arr[..., idx] = np.sort(arr[..., idx], axis=-1)
    return arr


def run_network_rows(items: np.ndarray, network: SortingNetwork) -> Proc:
    """Run ``network`` on every row of a ``(J, n)`` item matrix, one round per layer."""
    A = np.array(items, dtype=np.int64, copy=True)
    if A.ndim != 2 or A.shape[1] != network.n:
        raise UsageError(f"width mismatch: network has n={network.n}")
    J = A.shape[0]
    for buckets in network._buckets:
        if not buckets:
            continue
        occupants = [A[:, P].reshape(J * P.shape[0], P.shape[1]) for P in buckets]
        results = yield from parallel(tournament_rows(o) for o in occupants)
        for P, res in zip(buckets, results):
            A[:, P] = res.reshape(J, P.shape[0], P.shape[1])
    return A


def run_network(oracle: Oracle, X, network: SortingNetwork) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64).reshape(-1)
    if X.size != network.n:
        raise UsageError(f"width mismatch: {X.size} items, network has n={network.n}")
    return drive(oracle, run_network_rows(X[None, :], network))[0]


def sorting_arity(n: int, d: int) -> int:
    """``ceil(n^(2/sqrt(d)))`` clamped to ``[2, n]``."""
    if d < 1:
        raise UsageError("d must be at least 1")
    if n <= 2:
        return 2
    raw = n ** (2.0 / math.sqrt(d))
    return int(min(n, max(2, math.ceil(raw - 1e-9))))


@lru_cache(maxsize=256)
def plan_network(n: int, d: int) -> SortingNetwork:
    """Shallowest built network of depth at most ``d``, starting from the sized arity.

    If neither scheme meets depth ``d`` at the sized arity, the arity is raised
    through the next powers of two, ending at ``n`` (depth 1).
    """
    m = sorting_arity(n, d)
    candidates = [m]
    q = 1 << m.bit_length()
    while q < n:
        candidates.append(q)
        q <<= 1
    candidates.append(max(n, 2))
    for arity in candidates:
        nets = [build_network(n, arity, s) for s in Scheme]
        best = min(nets, key=lambda net: (net.depth, net.max_comparisons()))
        if best.depth <= d:
            return best
    raise AssertionError("unreachable: arity n always yields depth 1")


@dataclass(frozen=True)
class RoundSortResult:
    order: np.ndarray
    depth: int
    arity: int
    claimed_k: float
    comparisons: int
    rounds: int


def round_sort_rows(items: np.ndarray, d: int) -> Proc:
    items = np.asarray(items, dtype=np.int64)
    net = plan_network(items.shape[1], d)
    return (yield from run_network_rows(items, net))


def round_sort(oracle: Oracle, X=None, d: int = 1) -> RoundSortResult:
    """Sort in at most ``d`` rounds with claimed error ``2 * depth``."""
    if d < 1:
        raise UsageError("d must be at least 1")
    X = np.arange(oracle.n) if X is None else np.asarray(X, dtype=np.int64)
    net = plan_network(X.size, d)
    c0, r0 = oracle.snapshot_counts()
    order = run_network(oracle, X, net)
    c1, r1 = oracle.snapshot_counts()
    return RoundSortResult(order, net.depth, net.m, 2.0 * net.depth, c1 - c0, r1 - r0)
