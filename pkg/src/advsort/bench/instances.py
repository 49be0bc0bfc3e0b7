"""Seeded instance families for experiments.

A family is named by a string such as ``"uniform"``, ``"clustered:1:8"`` or
``"dense-at-rank:0.5"``. Values depend only on ``(family, n, seed)``; item
identity is the index, so every family shuffles its values before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from advsort.core import Instance, UsageError

__all__ = ["Family", "parse_family", "make_instance", "target_rank", "FAMILIES"]

FAMILIES = ("uniform", "all-equal", "clustered", "gapped", "dense-at-rank", "sparse-at-rank")


@dataclass(frozen=True)
class Family:
    name: str
    args: tuple[float, ...] = ()

    def __str__(self) -> str:
        return ":".join([self.name, *(_fmt(a) for a in self.args)])


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


_DEFAULT_ARGS = {
    "uniform": (),
    "all-equal": (),
    # two unit-wide clusters: more than n/4 items sit in [x_L, x_L + 1]
    "clustered": (1.0, 2.0),  # width, count
    "gapped": (8.0,),  # bands
    "dense-at-rank": (0.5,),
    "sparse-at-rank": (0.5,),
}

_ALIASES = {
    "uniformspread": "uniform",
    "allequal": "all-equal",
    "gappedbands": "gapped",
    "denseatrank": "dense-at-rank",
    "sparseatrank": "sparse-at-rank",
}


def parse_family(spec: str | Family) -> Family:
    if isinstance(spec, Family):
        return spec
    name, *rest = spec.strip().split(":")
    name = name.strip().lower().replace("_", "-")
    name = _ALIASES.get(name.replace("-", ""), name)
    if name not in _DEFAULT_ARGS:
        raise UsageError(f"unknown family {name!r}; valid: {', '.join(FAMILIES)}")
    defaults = _DEFAULT_ARGS[name]
    if len(rest) > len(defaults):
        raise UsageError(f"family {name!r} takes at most {len(defaults)} arguments")
    try:
        given = tuple(float(r) for r in rest)
    except ValueError as exc:
        raise UsageError(f"bad family arguments in {spec!r}") from exc
    return Family(name, given + defaults[len(given):])


def target_rank(family: Family | str, n: int) -> int:
    """The rank a family is built around; the median when it has none.

    A rank argument below 1 is a fraction of ``n``; otherwise it is a 1-based rank.
    """
    fam = parse_family(family)
    if fam.name in ("dense-at-rank", "sparse-at-rank"):
        q = fam.args[0]
        k = math.ceil(q * n) if q < 1 else int(q)
        return min(n, max(1, k))
    return max(1, math.ceil(n / 2))


def _ranked(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.sort(rng.uniform(0.0, n, n))


def make_instance(family: Family | str, n: int, seed: int) -> Instance:
    fam = parse_family(family)
    if n < 1:
        raise UsageError("n must be at least 1")
    rng = np.random.default_rng(seed)
    if fam.name == "uniform":
        v = rng.uniform(0.0, n, n)
    elif fam.name == "all-equal":
        v = np.zeros(n)
    elif fam.name == "clustered":
        width, count = fam.args[0], max(1, int(fam.args[1]))
        # centres far enough apart that clusters never touch
        centre = rng.integers(count, size=n) * (width + 2.0)
        v = centre + rng.uniform(0.0, width, n)
    elif fam.name == "gapped":
        bands = max(1, int(fam.args[0]))
        # a uniform spread cut at rank quantiles by empty gaps of width 2
        v = _ranked(rng, n) + 2.0 * np.floor(bands * np.arange(n) / n)
    elif fam.name == "dense-at-rank":
        k = target_rank(fam, n)
        v = _ranked(rng, n)
        t = v[k - 1]
        D = min(k, 2 * math.ceil(n ** (2 / 3) / 10))
        # ranks k-D+1..k move into [t-1, t]; s_k stays t
        v[k - D:k] = np.sort(t - rng.uniform(0.0, 1.0, D))
        v[k - 1] = t
        v = np.sort(v)
    else:  # sparse-at-rank
        k = target_rank(fam, n)
        W = math.ceil(n ** (2 / 3) / 10)
        r = np.arange(n)
        # extra spacing of 1.1 per rank inside a window of 2W ranks around k
        v = _ranked(rng, n) + 1.1 * np.clip(r - (k - 1 - W), 0, 2 * W)
    return Instance(rng.permutation(v))
