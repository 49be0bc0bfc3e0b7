import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from advsort.core import Instance, UsageError
from advsort.verify import (
    ApproxReport,
    empty_bands,
    gap_partition_respected,
    is_k_approx_selection,
    left_density,
    partition_gap,
    realized_sort_error,
    realized_sort_error_rows,
    right_density,
    selection_check_bruteforce,
    selection_error,
    sorted_distance,
)
from strategies import instances


def _pairwise_error(values, order):
    # independent O(n^2) oracle
    seq = [values[i] for i in order]
    worst = 0.0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            worst = max(worst, seq[a] - seq[b])
    return worst


def test_realized_error_examples():
    assert realized_sort_error([0.0, 1.0, 2.0], [0, 1, 2]) == 0.0
    assert realized_sort_error([0.0, 3.0], [1, 0]) == 3.0
    assert realized_sort_error([0.0, 0.5, 2.0], [1, 0, 2]) == 0.5
    assert realized_sort_error([7.0], [0]) == 0.0


def test_realized_error_rejects_non_permutations():
    with pytest.raises(UsageError):
        realized_sort_error([0.0, 1.0], [0, 0])
    with pytest.raises(UsageError):
        realized_sort_error([0.0, 1.0], [0])


@given(instances(min_n=1, max_n=10, grid=False), st.randoms(use_true_random=False))
def test_realized_error_matches_pairwise_oracle(values, rnd):
    order = list(range(values.size))
    rnd.shuffle(order)
    assert realized_sort_error(values, order) == pytest.approx(_pairwise_error(values, order), abs=0)


@given(instances(min_n=2, max_n=6, grid=False))
def test_rows_variant_agrees(values):
    perms = np.array(list(itertools.permutations(range(values.size))))
    rows = realized_sort_error_rows(values, perms)
    assert all(rows[t] == realized_sort_error(values, p) for t, p in enumerate(perms))


def test_selection_error_examples():
    inst = Instance([5.0, 1.0, 3.0])
    assert selection_error(inst, 1, 1) == 0.0
    assert selection_error(inst, 2, 0) == 2.0
    assert is_k_approx_selection(inst, 3, 2, 2.0)
    assert not is_k_approx_selection(inst, 3, 2, 1.9)
    with pytest.raises(UsageError):
        selection_error(inst, 0, 1)
    with pytest.raises(UsageError):
        selection_error(inst, 1, 3)


def _bruteforce_oracle(values, i, item, k):
    # some ordering with error <= k places `item` at position i
    n = len(values)
    for perm in itertools.permutations(range(n)):
        if perm[i - 1] == item and _pairwise_error(values, perm) <= k:
            return True
    return False


@given(instances(min_n=1, max_n=5), st.data(), st.sampled_from([0.0, 0.5, 1.0, 2.0]))
def test_bruteforce_check_matches_enumeration(values, data, k):
    n = values.size
    i = data.draw(st.integers(1, n))
    item = data.draw(st.integers(0, n - 1))
    assert selection_check_bruteforce(values, i, item, k) == _bruteforce_oracle(values, i, item, k)


def test_bruteforce_limits():
    with pytest.raises(UsageError):
        selection_check_bruteforce(np.zeros(9), 1, 0, 1.0)
    with pytest.raises(UsageError):
        selection_check_bruteforce(np.zeros(3), 4, 0, 1.0)


def test_sorted_distance():
    assert sorted_distance([3, 1, 2], [1, 2, 3.5]) == 0.5
    assert sorted_distance([], []) == 0.0
    with pytest.raises(UsageError):
        sorted_distance([1], [1, 2])


@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=30), st.floats(0, 5), st.data())
def test_sorting_never_increases_pointwise_distance(a, k, data):
    a = np.array(a)
    noise = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=a.size, max_size=a.size)))
    b = a + k * noise
    assert sorted_distance(a, b) <= k * (1 + 1e-12) + 1e-12


def test_empty_bands_and_gap_check():
    inst = Instance([0.0, 0.5, 3.0, 3.2])
    bands = empty_bands(inst)
    assert bands == [1.25]  # unit band centred in the gap (0.5, 3.0)
    assert gap_partition_respected(inst, [1, 0, 3, 2], 1.25)
    assert not gap_partition_respected(inst, [1, 2, 0, 3], 1.25)
    with pytest.raises(UsageError):
        gap_partition_respected(inst, [0, 1, 2, 3], 0.0)


def test_partition_gap_and_densities():
    inst = Instance([0.0, 1.0, 2.0, 2.5, 4.0])
    assert partition_gap(inst, [0, 1], [2, 3, 4]) == 0.0
    assert partition_gap(inst, [3, 1], [2, 0]) == 2.5
    assert partition_gap(inst, [], [1]) == 0.0
    assert left_density(inst, 3) == 2  # values in [1, 2]
    assert right_density(inst, 3) == 2  # values in [2, 3]


def test_approx_report_recomputes_pass():
    r = ApproxReport(realized_k=3.0, claimed_k=2.0, comparisons=5, rounds=1, passed=True)
    assert r.passed is False
    d = r.to_dict()
    assert d["pass"] is False and "passed" not in d
    assert json.loads(r.to_json())["realized_k"] == 3.0
    assert ApproxReport.csv_header() == "realized_k,claimed_k,comparisons,rounds,pass\n"
    assert r.to_csv_row() == "3.0,2.0,5,1,False\n"
    with pytest.raises(UsageError):
        ApproxReport(-1.0, 1.0, 0, 0)


def test_approx_report_constructors():
    inst = Instance([0.0, 0.5, 2.0])
    assert ApproxReport.for_order(inst, [1, 0, 2], 2).realized_k == 0.5
    assert ApproxReport.for_selection(inst, 3, 1, 2).passed is True
