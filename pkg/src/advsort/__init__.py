"""Sorting and selection when close comparisons are decided by an adversary.

Comparisons between values more than 1 apart are answered truthfully; the
rest are answered by an adaptive policy. Algorithms are written as round
procedures so that comparisons and rounds are both accounted for.
"""

from advsort.adversaries import (
    POLICIES,
    AdversaryPolicy,
    ContractViolation,
    CycleForcer,
    FixedPattern,
    Honest,
    PivotStarver,
    ReverseClose,
    SeededRandom,
    make_policy,
)
from advsort.baselines import (
    naive_quickselect,
    naive_quicksort,
    tournament_max,
    tournament_min,
    tournament_order,
    tournament_wins,
)
from advsort.core import Instance, Oracle, OracleConfig, Transcript, UsageError, drive, parallel
from advsort.netsort import Scheme, SortingNetwork, build_network, round_sort, run_network
from advsort.roundselect import (
    count,
    get_max,
    get_min,
    select_combined,
    select_combined_detailed,
    select_dense,
    select_sparse,
)
from advsort.rsort import RSortParams, rselect, rsort
from advsort.verify import (
    ApproxReport,
    is_k_approx_selection,
    partition_gap,
    realized_sort_error,
    selection_check_bruteforce,
    selection_error,
)

__version__ = "0.1.0"

__all__ = [
    "POLICIES", "AdversaryPolicy", "ContractViolation", "CycleForcer", "FixedPattern", "Honest",
    "PivotStarver", "ReverseClose", "SeededRandom", "make_policy",
    "naive_quickselect", "naive_quicksort", "tournament_max", "tournament_min", "tournament_order",
    "tournament_wins",
    "Instance", "Oracle", "OracleConfig", "Transcript", "UsageError", "drive", "parallel",
    "Scheme", "SortingNetwork", "build_network", "round_sort", "run_network",
    "count", "get_max", "get_min", "select_combined", "select_combined_detailed", "select_dense", "select_sparse",
    "RSortParams", "rselect", "rsort",
    "ApproxReport", "is_k_approx_selection", "partition_gap", "realized_sort_error", "selection_check_bruteforce",
    "selection_error",
]
