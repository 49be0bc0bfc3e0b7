"""Experiment harness: instance families, seeded grids, CSV outputs and fits."""

from advsort.bench.experiment import (
    ALGORITHMS,
    COLUMNS,
    ExperimentSpec,
    FitReport,
    Model,
    aggregate,
    cell_seed,
    emit_outputs,
    fit_scaling,
    read_csv,
    run_cell,
    run_experiment,
    verify_rows,
    write_csv,
)
from advsort.bench.instances import FAMILIES, Family, make_instance, parse_family, target_rank

__all__ = [
    "ALGORITHMS", "COLUMNS", "ExperimentSpec", "FitReport", "Model", "aggregate", "cell_seed",
    "emit_outputs", "fit_scaling", "read_csv", "run_cell", "run_experiment", "verify_rows",
    "write_csv", "FAMILIES", "Family", "make_instance", "parse_family", "target_rank",
]
