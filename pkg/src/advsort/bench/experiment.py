"""Seeded experiment grids, result tables and scaling fits.

A result table is a list of row dicts with the columns in :data:`COLUMNS`.
Every row carries its own ``seed``; instance, policy and algorithm
randomness are all derived from it, so any row can be re-run on its own.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from advsort.adversaries import make_policy
from advsort.baselines import naive_quickselect, naive_quicksort, tournament_order
from advsort.bench.instances import make_instance, parse_family, target_rank
from advsort.core import Oracle, UsageError
from advsort.netsort import round_sort
from advsort.roundselect import select_combined_detailed, theory_c
from advsort.rsort import RSortParams, rselect, rsort
from advsort.verify import realized_sort_error, selection_error

__all__ = [
    "COLUMNS",
    "ALGORITHMS",
    "ExperimentSpec",
    "Model",
    "FitReport",
    "cell_seed",
    "run_cell",
    "run_experiment",
    "fit_scaling",
    "aggregate",
    "emit_outputs",
    "write_csv",
    "read_csv",
    "verify_rows",
]

COLUMNS = (
    "algorithm", "family", "policy", "n", "trial", "seed", "rank", "d",
    "realized_k", "claimed_k", "pass", "comparisons", "rounds", "branch", "params",
)

_INT_COLS = {"n", "trial", "seed", "d", "comparisons", "rounds"}
_FLOAT_COLS = {"realized_k", "claimed_k"}

_RSORT_KEYS = {"c1", "c2", "c3", "r", "base_case"}
_SELECT_KEYS = {"c", "r"}


# --- algorithms --------------------------------------------------------------
# Each runner returns (output, claimed_k, branch); output is an order or an item.


def _rsort_params(params: dict, theory: bool, seed: int) -> RSortParams:
    kw = {k: params[k] for k in _RSORT_KEYS & params.keys()}
    if "base_case" in kw:
        kw["base_case"] = int(kw["base_case"])
    if theory:
        return RSortParams.theory(seed=seed, **kw)
    return RSortParams(seed=seed, **kw)


def _select_c(params: dict, theory: bool) -> float:
    if "c" in params:
        return float(params["c"])
    return theory_c(params.get("r", 2.0)) if theory else 1.0


def _run_tournament(oracle, rank, d, params, theory, seed):
    return tournament_order(oracle), 2.0, ""


def _run_quicksort(oracle, rank, d, params, theory, seed):
    return naive_quicksort(oracle, seed=seed), 2.0, ""


def _run_quickselect(oracle, rank, d, params, theory, seed):
    return naive_quickselect(oracle, rank=rank, seed=seed), 2.0, ""


def _run_rsort(oracle, rank, d, params, theory, seed):
    return rsort(oracle, params=_rsort_params(params, theory, seed)), 4.0, ""


def _run_rselect(oracle, rank, d, params, theory, seed):
    return rselect(oracle, rank=rank, params=_rsort_params(params, theory, seed)), 4.0, ""


def _run_roundsort(oracle, rank, d, params, theory, seed):
    res = round_sort(oracle, d=d)
    return res.order, res.claimed_k, f"m={res.arity}"


def _run_roundselect(oracle, rank, d, params, theory, seed):
    res = select_combined_detailed(oracle, k=rank, d=d, c=_select_c(params, theory), seed=seed)
    return res.item, res.K, f"{res.branch}/{res.sparse_path}"


# name -> (runner, is_selection)
ALGORITHMS = {
    "tournament": (_run_tournament, False),
    "quicksort": (_run_quicksort, False),
    "quickselect": (_run_quickselect, True),
    "rsort": (_run_rsort, False),
    "rselect": (_run_rselect, True),
    "roundsort": (_run_roundsort, False),
    "roundselect": (_run_roundselect, True),
}


def _algorithm(name: str):
    key = name.strip().lower().replace("_", "-").replace("-", "")
    if key not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {name!r}; valid: {', '.join(ALGORITHMS)}")
    return key, *ALGORITHMS[key]


# --- specs and cells -------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: str = "rsort"
    policy: str = "honest"
    sizes: tuple[int, ...] = (1024,)
    trials: int = 10
    family: str = "uniform"
    params: dict = field(default_factory=dict)
    seed: int = 0
    d: int = 3
    rank: int | None = None
    theory_constants: bool = False
    output_path: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not self.sizes:
            raise UsageError("sizes must be non-empty")
        if any(n < 1 for n in self.sizes):
            raise UsageError("sizes must be positive")
        if self.d < 1:
            raise UsageError("d must be at least 1")
        _algorithm(self.algorithm)
        make_policy(self.policy)
        parse_family(self.family)
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))


def cell_seed(master: int, n: int, trial: int) -> int:
    """Independent per-cell seed from the master seed and the cell coordinates."""
    return int(np.random.SeedSequence(int(master), spawn_key=(int(n), int(trial))).generate_state(1)[0])


def _policy_for(spec_policy: str, seed: int):
    name, sep, explicit = spec_policy.partition(":")
    policy_seed = int(explicit) if sep and explicit else seed
    return make_policy(f"{name}:{policy_seed}")


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in sorted(params))


def _parse_params(text: str) -> dict:
    out = {}
    for part in filter(None, (text or "").split(";")):
        k, _, v = part.partition("=")
        out[k] = float(v)
    return out


def _fmt_float(x: float) -> float:
    # rounding at 12 significant digits keeps CSV text stable across platforms
    return float(f"{x:.12g}")


def run_cell(algorithm: str, family: str, policy: str, n: int, trial: int, seed: int,
             rank: int | None = None, d: int = 3, params: dict | None = None,
             theory_constants: bool = False) -> dict:
    """One trial: build the instance and oracle, run, and verify from ground truth."""
    name, runner, is_selection = _algorithm(algorithm)
    params = dict(params or {})
    inst_seed, policy_seed, algo_seed = (int(s) for s in np.random.SeedSequence(seed).generate_state(3))
    instance = make_instance(family, n, inst_seed)
    pol = _policy_for(policy, policy_seed)
    oracle = Oracle(instance, pol)
    k = rank if rank is not None else target_rank(family, n)
    if is_selection and not 1 <= k <= n:
        raise UsageError(f"rank {k} out of range 1..{n}")
    out, claimed, branch = runner(oracle, k, d, params, theory_constants, algo_seed)
    realized = selection_error(instance, k, out) if is_selection else realized_sort_error(instance, out)
    comparisons, rounds = oracle.snapshot_counts()
    return {
        "algorithm": name,
        "family": str(parse_family(family)),
        "policy": pol.spec(),
        "n": int(n),
        "trial": int(trial),
        "seed": int(seed),
        "rank": int(k) if is_selection else "",
        "d": int(d),
        "realized_k": _fmt_float(realized),
        "claimed_k": _fmt_float(claimed),
        "pass": bool(realized <= claimed),
        "comparisons": int(comparisons),
        "rounds": int(rounds),
        "branch": branch,
        "params": _params_text({**params, **({"theory": 1} if theory_constants else {})}),
    }


def _cell_args(spec: ExperimentSpec):
    for n in spec.sizes:
        for t in range(spec.trials):
            yield (spec.algorithm, spec.family, spec.policy, n, t, cell_seed(spec.seed, n, t),
                   spec.rank, spec.d, spec.params, spec.theory_constants)


def _star(args):
    return run_cell(*args)


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """Rows in ``(size, trial)`` order regardless of how many workers ran them."""
    cells = list(_cell_args(spec))
    if spec.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(_star, cells, chunksize=max(1, len(cells) // (4 * spec.jobs))))
    return [_star(c) for c in cells]


def verify_rows(rows: list[dict]) -> list[tuple[int, str]]:
    """Re-run every row from its seed; returns ``(row index, reason)`` for mismatches."""
    bad = []
    for i, row in enumerate(rows):
        params = _parse_params(row.get("params", ""))
        theory = bool(params.pop("theory", 0))
        rank = row["rank"] if row["rank"] not in ("", None) else None
        try:
            again = run_cell(row["algorithm"], row["family"], row["policy"], row["n"], row["trial"],
                             row["seed"], rank, row["d"], params, theory)
        except UsageError as exc:
            bad.append((i, f"cannot re-run: {exc}"))
            continue
        diffs = [c for c in COLUMNS if _norm(again[c]) != _norm(row[c])]
        if diffs:
            bad.append((i, "mismatch in " + ", ".join(diffs)))
    return bad


def _norm(x):
    return "" if x is None else x


# --- outputs ----------------------------------------------------------------


def _cell_text(col: str, x) -> str:
    if col == "pass":
        return "true" if x else "false"
    if col in _FLOAT_COLS:
        return repr(float(x))
    return str(x)


def write_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fp:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_cell_text(c, row[c]) for c in COLUMNS])
    return path


def read_csv(path) -> list[dict]:
    rows = []
    with Path(path).open(newline="") as fp:
        for raw in csv.DictReader(fp):
            row: dict = {}
            for c in COLUMNS:
                v = raw.get(c, "")
                if c in _INT_COLS:
                    row[c] = int(v)
                elif c in _FLOAT_COLS:
                    row[c] = float(v)
                elif c == "pass":
                    row[c] = v.strip().lower() == "true"
                elif c == "rank":
                    row[c] = int(v) if v else ""
                else:
                    row[c] = v
            rows.append(row)
    return rows


def aggregate(rows: list[dict]) -> list[dict]:
    """Per-size summary: mean and p95 of comparisons, mean rounds, failure rate."""
    out = []
    for n in sorted({r["n"] for r in rows}):
        sel = [r for r in rows if r["n"] == n]
        comps = np.array([r["comparisons"] for r in sel], dtype=float)
        out.append({
            "n": n,
            "trials": len(sel),
            "mean_comparisons": float(comps.mean()),
            "p95_comparisons": float(np.percentile(comps, 95)),
            "mean_rounds": float(np.mean([r["rounds"] for r in sel])),
            "max_realized_k": float(max(r["realized_k"] for r in sel)),
            "failure_rate": float(np.mean([not r["pass"] for r in sel])),
        })
    return out


def emit_outputs(rows: list[dict], path) -> tuple[Path, Path]:
    """Write the per-trial CSV and a whitespace plot-data file next to it (``.dat``)."""
    csv_path = Path(path)
    if csv_path.parent and not csv_path.parent.exists():
        raise UsageError(f"directory {csv_path.parent} does not exist")
    if not os.access(csv_path.parent or Path("."), os.W_OK):
        raise UsageError(f"cannot write to {csv_path.parent}")
    write_csv(rows, csv_path)
    dat_path = csv_path.with_suffix(".dat")
    agg = aggregate(rows)
    cols = ["n", "mean_comparisons", "p95_comparisons", "mean_rounds", "failure_rate", "max_realized_k"]
    with dat_path.open("w") as fp:
        fp.write("# " + " ".join(cols) + "\n")
        for a in agg:
            fp.write(" ".join(repr(a[c]) if isinstance(a[c], float) else str(a[c]) for c in cols) + "\n")
    return csv_path, dat_path


# --- scaling fits -------------------------------------------------------------


class Model(str, Enum):
    NLogN = "nlogn"
    NLog2N = "nlog2n"
    PowerLaw = "powerlaw"


@dataclass(frozen=True)
class FitReport:
    """``deviation`` is ``max |y / fit - 1|``; ``spread`` is max/min of ``y / shape``."""

    model: str
    coefficient: float
    exponent: float | None
    deviation: float
    spread: float
    sizes: tuple[int, ...]
    means: tuple[float, ...]

    def summary(self) -> str:
        exp = f" exponent={self.exponent:.4f}" if self.exponent is not None else ""
        return (f"model={self.model} coefficient={self.coefficient:.6g}{exp} "
                f"deviation={self.deviation:.4f} spread={self.spread:.4f}")


def fit_scaling(data, model: Model | str = Model.NLog2N) -> FitReport:
    """Least-squares fit of mean comparisons against a growth model.

    ``data`` is a result table or an iterable of ``(n, comparisons)`` pairs.
    """
    model = Model(str(model).lower() if not isinstance(model, Model) else model)
    pairs = [(r["n"], r["comparisons"]) for r in data] if _is_table(data) else list(data)
    by_n: dict[int, list[float]] = {}
    for n, y in pairs:
        by_n.setdefault(int(n), []).append(float(y))
    if len(by_n) < 3:
        raise UsageError("fit needs at least 3 distinct sizes")
    ns = np.array(sorted(by_n), dtype=float)
    ys = np.array([np.mean(by_n[int(n)]) for n in ns])
    if model is Model.PowerLaw:
        if np.any(ys <= 0):
            raise UsageError("power-law fit needs positive means")
        b, a = np.polyfit(np.log(ns), np.log(ys), 1)
        coef, exponent = float(math.exp(a)), float(b)
        shape = ns ** exponent
    else:
        shape = ns * np.log(ns) if model is Model.NLogN else ns * np.log(ns) ** 2
        coef, exponent = float(np.dot(ys, shape) / np.dot(shape, shape)), None
    ratio = ys / shape
    return FitReport(
        model=model.value,
        coefficient=coef,
        exponent=exponent,
        deviation=float(np.max(np.abs(ratio / coef - 1.0))),
        spread=float(ratio.max() / ratio.min()) if ratio.min() > 0 else math.inf,
        sizes=tuple(int(n) for n in ns),
        means=tuple(float(y) for y in ys),
    )


def _is_table(data) -> bool:
    return isinstance(data, list) and bool(data) and isinstance(data[0], dict)


def with_overrides(spec: ExperimentSpec, **kw) -> ExperimentSpec:
    return replace(spec, **{k: v for k, v in kw.items() if v is not None})
