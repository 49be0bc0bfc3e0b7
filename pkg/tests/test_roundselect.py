import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advsort.adversaries import FixedPattern
from advsort.baselines import tournament_max
from advsort.core import Oracle, UsageError
from advsort.roundselect import (
    DenseSide,
    count,
    dense_index,
    dense_sample_size,
    get_max,
    get_min,
    knockout_levels,
    select_combined,
    select_combined_detailed,
    select_dense,
    select_sparse,
    sparse_sizes,
    theory_c,
)
from advsort.verify import selection_error
from patterns import close_pairs
from strategies import instances, policies


def far_values(n, seed=0):
    return np.random.default_rng(seed).permutation(np.arange(n) * 2.5)


def test_frozen_sizes():
    assert [knockout_levels(d) for d in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]
    assert sparse_sizes(4096, 1.0) == (16, math.ceil(256 * math.log(4096)))
    assert dense_sample_size(4096, 1.0) == 4096
    assert dense_sample_size(4096, 0.05) == 426
    # margin floor(0.05 * 32 * ln 4096) = 13
    # centre ceil(2048 * 426 / 4096) - 1 = 212
    assert dense_index(4096, 2048, 426, 0.05, DenseSide.Minus) == 212 - 13
    assert dense_index(4096, 2048, 426, 0.05, "plus") == 212 + 13
    assert dense_index(4096, 1, 426, 0.05, DenseSide.Minus) == 0
    assert dense_index(4096, 4096, 426, 0.05, DenseSide.Plus) == 425
    assert dense_index(100, 37, 100, 1.0, DenseSide.Minus) == 36
    assert theory_c(2) == 181


def test_count_reverse_close_all_equal():
    o = Oracle(np.zeros(3), "reverse-close")
    assert [count(o, item=i) for i in range(3)] == [2, 1, 0]
    assert o.snapshot_counts() == (6, 3)


def test_count_honest_is_rank_minus_one():
    values = far_values(50)
    o = Oracle(values)
    for i in (0, 7, 49):
        assert count(o, item=i) == int((values < values[i]).sum())
    with pytest.raises(UsageError):
        count(o, X=[1, 2], item=5)


def test_get_max_singleton_costs_nothing():
    o = Oracle([4.0])
    assert get_max(o, d=3) == 0 and get_min(o, d=3) == 0
    assert o.snapshot_counts() == (0, 0)


@given(instances(1, 10), policies())
def test_get_max_one_level_is_one_tournament(values, policy):
    o = Oracle(values, policy)
    x = get_max(o, d=2)
    n = values.size
    assert values[x] >= values.max() - 2
    assert o.snapshot_counts() == (n * (n - 1) // 2, int(n > 1))


def test_get_max_one_level_honest_matches_tournament():
    values = far_values(40, 2)
    assert get_max(Oracle(values), d=1) == tournament_max(Oracle(values)) == int(values.argmax())


def test_get_max_two_levels_every_adversary():
    grid = (0.0, 1.0, 2.0, 3.0)
    for n in range(1, 5):
        for vals in itertools.product(grid, repeat=n):
            values = np.array(vals)
            pairs = close_pairs(values)
            for bits in range(2 ** len(pairs)):
                pol = FixedPattern.from_bits(pairs, bits, n)
                hi = values[get_max(Oracle(values, pol), d=3)]
                lo = values[get_min(Oracle(values, FixedPattern.from_bits(pairs, bits, n)), d=3)]
                assert hi >= values.max() - 4
                assert lo <= values.min() + 4


@settings(max_examples=30)
@given(st.integers(2, 300), st.integers(1, 9), policies(), st.integers(0, 100))
def test_get_max_rounds_and_guarantee(n, d, policy, seed):
    values = np.random.default_rng(seed).uniform(0, 6, n)
    o = Oracle(values, policy)
    x = get_max(o, d=d)
    assert values[x] >= values.max() - 2 * knockout_levels(d)
    assert o.snapshot_counts()[1] <= knockout_levels(d)


def test_select_dense_matches_resampled_index():
    n, k, c, seed = 4096, 1000, 0.05, 11
    values = far_values(n, 1)
    for side in DenseSide:
        got = select_dense(Oracle(values), k=k, side=side, c=c, seed=seed)
        # oracle: redraw the same sample and index its true order
        s = dense_sample_size(n, c)
        sample = np.random.default_rng(seed).choice(n, s, replace=False)
        sample = sample[np.argsort(values[sample])]
        assert got == sample[dense_index(n, k, s, c, side)]


def test_select_sparse_is_left_approximate_at_theory_c():
    # one-sided guarantee only; needs c above the union-bound threshold
    n = 216
    values = far_values(n, 3)
    target = np.sort(values)
    for k in (1, 100, 216):
        item = select_sparse(Oracle(values), k=k, d=3, c=theory_c(1), seed=2)
        assert values[item] >= target[k - 1]


@pytest.mark.parametrize("k", [1, 2, 333, 512, 1024])
def test_combined_far_values_exact(k):
    values = far_values(1024, 5)
    item = select_combined(Oracle(values), k=k, d=3, seed=1)
    assert selection_error(values, k, item) == 0.0


def test_combined_all_equal_any_answer_valid():
    res = select_combined_detailed(Oracle(np.zeros(512), "cycle-forcer"), k=200, d=4)
    assert 0 <= res.item < 512 and selection_error(np.zeros(512), 200, res.item) == 0.0


def test_combined_trivial_and_errors():
    assert select_combined(Oracle([2.0]), k=1) == 0
    with pytest.raises(UsageError):
        select_combined(Oracle(np.zeros(4)), k=5)
    with pytest.raises(UsageError):
        select_combined(Oracle(np.zeros(4)), k=1, d=0)


@settings(max_examples=25)
@given(st.integers(2, 400), st.integers(1, 6), policies(), st.data())
def test_combined_sandwich_budget_and_partition(n, d, policy, data):
    values = np.random.default_rng(data.draw(st.integers(0, 999))).uniform(0, n / 4, n)
    k = data.draw(st.integers(1, n))
    o = Oracle(values, policy)
    res = select_combined_detailed(o, k=k, d=d, seed=data.draw(st.integers(0, 99)))
    assert selection_error(values, k, res.item) <= res.K
    assert res.item in (res.x_i, res.x_j)
    assert o.snapshot_counts()[1] <= d + 102 + min(100, math.log2(d)) + (d == 1)
    assert sum(res.extras.values()) == n
    assert res.sparse_path in ("Z", "Y", "Gamma")


def test_combined_dense_minus_branch_when_sparse_undershoots():
    # with c small the sample misses; a low sparse answer selects Minus
    n = 4096
    values = far_values(n, 8)
    seen = set()
    for seed in range(6):
        res = select_combined_detailed(Oracle(values), k=2048, d=2, c=0.05, seed=seed)
        seen.add(res.branch)
        if res.branch == "minus":
            assert res.c_i < 2048
            assert values[res.item] >= values[res.x_i]
    assert seen <= {"minus", "plus"}


def test_combined_is_deterministic():
    values = np.random.default_rng(0).uniform(0, 100, 700)
    a = select_combined_detailed(Oracle(values, "seeded-random:1"), k=350, d=3, seed=4)
    b = select_combined_detailed(Oracle(values, "seeded-random:1"), k=350, d=3, seed=4)
    assert (a.item, a.x_i, a.x_j, a.c_i) == (b.item, b.x_i, b.x_j, b.c_i)
