"""Command line front end: ``advsort-bench run | fit | verify``.

Settings for ``run`` come from an optional ``key = value`` config file and
from flags; flags win. Config keys are the long flag names without dashes
(``algo``, ``policy``, ``n``, ...); any other key is an algorithm parameter
such as ``c1`` or ``c``. Ranks are 1-based.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from advsort.core import UsageError
from advsort.bench.experiment import (
    ALGORITHMS,
    ExperimentSpec,
    Model,
    aggregate,
    emit_outputs,
    fit_scaling,
    read_csv,
    run_experiment,
    verify_rows,
)
from advsort.bench.instances import FAMILIES

_SPEC_KEYS = {"algo", "policy", "family", "n", "trials", "seed", "d", "rank", "theory_constants", "out", "jobs"}
_TRUE = {"1", "true", "yes", "on"}


def read_config(path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise UsageError(f"bad size list {text!r}") from exc


def _param_pairs(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        out[key.strip().replace("-", "_")] = float(value)
    return out


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    cfg = read_config(args.config) if args.config else {}
    params = {k: float(v) for k, v in cfg.items() if k not in _SPEC_KEYS}
    params.update(_param_pairs(args.param))

    def pick(key, cast, default):
        flag = getattr(args, key)
        if flag is not None:
            return flag
        return cast(cfg[key]) if key in cfg else default

    theory = args.theory_constants or cfg.get("theory_constants", "").lower() in _TRUE
    rank = pick("rank", int, None)
    return ExperimentSpec(
        algorithm=pick("algo", str, "rsort"),
        policy=pick("policy", str, "honest"),
        sizes=pick("n", _sizes, (1024,)),
        trials=pick("trials", int, 10),
        family=pick("family", str, "uniform"),
        params=params,
        seed=pick("seed", int, 0),
        d=pick("d", int, 3),
        rank=rank,
        theory_constants=theory,
        output_path=pick("out", str, None),
        jobs=pick("jobs", int, 1),
    )


def cmd_run(args) -> int:
    spec = build_spec(args)
    rows = run_experiment(spec)
    if spec.output_path:
        csv_path, dat_path = emit_outputs(rows, spec.output_path)
        print(f"wrote {csv_path} and {dat_path}", file=sys.stderr)
    print(f"{'n':>7} {'trials':>6} {'fail':>6} {'max_k':>8} {'mean_cmp':>12} {'mean_rounds':>11}")
    for a in aggregate(rows):
        print(f"{a['n']:>7} {a['trials']:>6} {a['failure_rate']:>6.3f} {a['max_realized_k']:>8.3f} "
              f"{a['mean_comparisons']:>12.1f} {a['mean_rounds']:>11.1f}")
    return 0


def cmd_fit(args) -> int:
    rows = read_csv(args.csv)
    print(fit_scaling(rows, args.model).summary())
    return 0


def cmd_verify(args) -> int:
    rows = read_csv(args.csv)
    bad = verify_rows(rows)
    for i, reason in bad:
        print(f"row {i}: {reason}")
    print(f"{len(rows) - len(bad)}/{len(rows)} rows reproduced")
    return 1 if bad else 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="advsort-bench", description="Seeded experiments for sorting under adversarial comparisons.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid")
    run.add_argument("--config", help="key = value settings file (flags override it)")
    run.add_argument("--algo", help=f"one of: {', '.join(ALGORITHMS)}")
    run.add_argument("--policy", help="adversary as name or name:seed, e.g. pivot-starver")
    run.add_argument("--family", help=f"instance family, e.g. clustered:1:8; one of: {', '.join(FAMILIES)}")
    run.add_argument("--n", type=_sizes, help="sizes, comma separated")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--d", type=int, help="round budget for roundsort/roundselect")
    run.add_argument("--rank", type=int, help="1-based target rank for selection (default: family rank or median)")
    run.add_argument("--theory-constants", action="store_true", help="use the constants under which the high-probability bounds hold")
    run.add_argument("--param", action="append", metavar="KEY=VALUE", help="algorithm parameter, repeatable")
    run.add_argument("--out", help="CSV path; a .dat plot file is written next to it")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.set_defaults(func=cmd_run)

    fit = sub.add_parser("fit", help="fit comparison counts in a CSV against a growth model")
    fit.add_argument("csv")
    fit.add_argument("--model", default=Model.NLog2N.value, choices=[m.value for m in Model])
    fit.set_defaults(func=cmd_fit)

    ver = sub.add_parser("verify", help="re-run every CSV row from its seed and compare")
    ver.add_argument("csv")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError) as exc:
        print(f"advsort-bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
