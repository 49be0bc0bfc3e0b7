import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from advsort.core import Instance, Oracle, UsageError
from advsort.netsort import (
    Scheme,
    SortingNetwork,
    apply_exact,
    build_network,
    plan_network,
    round_sort,
    run_network,
    run_network_rows,
    sorting_arity,
    zero_one_check,
)
from advsort.verify import empty_bands, gap_partition_respected, realized_sort_error, realized_sort_error_rows
from patterns import close_pairs, drive_patterns, grid_instances, stacked_items
from strategies import policies


def _exact_sort_oracle(net, values):
    # direct simulation with Python's sort, independent of apply_exact
    arr = list(values)
    for layer in net.layers:
        for g in layer:
            vals = sorted(arr[p] for p in g)
            for p, v in zip(g, vals):
                arr[p] = v
    return arr


def test_full_width_is_one_group():
    net = build_network(7, 7)
    assert net.depth == 1 and net.layers == ((tuple(range(7)),),)


def test_four_wide_binary_network_is_batcher():
    net = build_network(4, 2, Scheme.KWayOddEven)
    assert net.depth == 3
    assert net.layers[0] == ((0, 1), (2, 3))


@pytest.mark.parametrize("scheme", list(Scheme))
def test_all_small_networks_pass_zero_one(scheme):
    for n in range(1, 10):
        for m in range(2, max(3, n + 1)):
            assert zero_one_check(build_network(n, m, scheme)), (n, m, scheme)


@pytest.mark.parametrize("n,m", [(64, 8), (100, 4), (300, 16), (777, 5), (1000, 3), (513, 64)])
@pytest.mark.parametrize("scheme", list(Scheme))
def test_larger_networks_sort_random_reals(n, m, scheme, rng):
    net = build_network(n, m, scheme)
    v = rng.normal(size=n)
    out = apply_exact(net, v)
    assert np.all(np.diff(out) >= 0)
    assert out.tolist() == _exact_sort_oracle(net, v)
    assert max(len(g) for layer in net.layers for g in layer) <= m


def test_measured_depths():
    # frozen from the constructions; a change here changes the claimed bounds
    depths = {(n, m): (build_network(n, m, Scheme.KWayOddEven).depth, build_network(n, m, Scheme.RecursiveMerge).depth)
              for n, m in [(64, 8), (256, 16), (1024, 32), (512, 64)]}
    assert depths == {(64, 8): (7, 16), (256, 16): (9, 15), (1024, 32): (11, 16), (512, 64): (7, 6)}


def test_network_validation():
    with pytest.raises(UsageError):
        build_network(5, 1)
    with pytest.raises(UsageError):
        SortingNetwork(3, 2, (((0, 1), (1, 2)),))
    with pytest.raises(UsageError):
        SortingNetwork(3, 2, (((0, 1, 2),),))
    with pytest.raises(UsageError):
        SortingNetwork(3, 3, (((0, 3),),))


@given(st.integers(1, 40), st.integers(2, 12), st.sampled_from(list(Scheme)))
def test_text_round_trip(n, m, scheme):
    net = build_network(n, m, scheme)
    back = SortingNetwork.from_text(net.to_text())
    assert back == net


def test_text_needs_header():
    with pytest.raises(UsageError):
        SortingNetwork.from_text("0: 0 1\n")


@given(st.integers(2, 60), st.integers(2, 8), policies())
def test_run_network_accounting_and_bound(n, m, policy):
    rng = np.random.default_rng(n * 31 + m)
    values = rng.uniform(0, n / 4, n)
    net = build_network(n, m)
    o = Oracle(values, policy)
    order = run_network(o, np.arange(n), net)
    comps, rounds = o.snapshot_counts()
    assert rounds == net.depth
    assert comps <= net.depth * (-(-n // m)) * m * (m - 1) // 2
    assert comps == net.max_comparisons()
    assert realized_sort_error(values, order) <= 2 * net.depth


def test_run_network_width_mismatch():
    with pytest.raises(UsageError):
        run_network(Oracle(np.zeros(4)), [0, 1, 2], build_network(4, 2))


@pytest.mark.parametrize("policy", ["honest", "reverse-close", "cycle-forcer", "pivot-starver", "seeded-random:5"])
def test_far_values_sort_exactly(policy, rng):
    values = rng.permutation(np.arange(90) * 1.5)
    order = run_network(Oracle(values, policy), np.arange(90), build_network(90, 6))
    assert realized_sort_error(values, order) == 0.0


def test_sorting_arity():
    assert sorting_arity(256, 4) == 256
    assert sorting_arity(4096, 100) == 6
    assert sorting_arity(2, 9) == 2
    with pytest.raises(UsageError):
        sorting_arity(10, 0)


def test_round_sort_degenerates_to_tournament():
    o = Oracle(np.zeros(256), "cycle-forcer")
    res = round_sort(o, d=4)
    assert res.arity == 256 and res.depth == 1 and res.claimed_k == 2.0
    assert (res.comparisons, res.rounds) == (256 * 255 // 2, 1)


@pytest.mark.parametrize("n,d", [(512, 2), (512, 4), (512, 9), (1000, 30), (64, 1)])
def test_round_sort_respects_budget(n, d, rng):
    values = rng.uniform(0, n / 8, n)
    o = Oracle(values, "seeded-random:1")
    res = round_sort(o, d=d)
    assert res.depth <= d and res.rounds == res.depth
    assert res.claimed_k == 2 * res.depth
    assert realized_sort_error(values, res.order) <= res.claimed_k


def test_round_sort_rejects_zero_rounds():
    with pytest.raises(UsageError):
        round_sort(Oracle([0.0, 1.0]), d=0)


def test_plan_network_prefers_shallow():
    net = plan_network(4096, 100)
    assert net.m == 6 and net.depth == 41


@pytest.mark.parametrize("policy", ["reverse-close", "cycle-forcer", "pivot-starver"])
def test_gapped_instance_keeps_gap(policy, rng):
    values = np.concatenate([rng.uniform(0, 5, 40), rng.uniform(6.5, 11, 40)])
    inst = Instance(rng.permutation(values))
    order = round_sort(Oracle(inst, policy), d=4).order
    for y in empty_bands(inst):
        assert gap_partition_respected(inst, order, y)


def test_every_pattern_on_tiny_networks():
    # all consistent close-pair adversaries, n <= 4, all networks of depth <= 3
    for values in grid_instances(4, grid=(0.0, 0.5, 1.0, 2.0)):
        n = values.size
        P = 2 ** len(close_pairs(values))
        for m in range(2, max(3, n + 1)):
            for scheme in Scheme:
                net = build_network(n, m, scheme)
                if net.depth > 3:
                    continue
                out = drive_patterns(values, run_network_rows(stacked_items(n, P), net))
                errs = realized_sort_error_rows(values, out % n)
                assert errs.max() <= 2 * max(net.depth, 1)
