"""Placement bookkeeping and the delay/energy/objective model.

The toy2 fixture numbers below were worked out by hand from the rate
tables in conftest before being frozen here.
"""

import numpy as np
import pytest

from fogcache import (
    Partition,
    PlacementEvaluator,
    caching_energy,
    cluster_has,
    delay_components,
    energy_components,
    evaluate,
    feasible,
    new_placement,
    request_delay,
    request_energy,
)

from conftest import make_params, make_rates, make_scenario


# ---------------------------------------------------------------------------
# partitions


def test_partition_constructors():
    s = Partition.singletons(3)
    assert s.to_lists() == [[0], [1], [2]]
    w = Partition.whole_set(3)
    assert w.to_lists() == [[0, 1, 2]]
    labels = Partition.from_labels([1, 0, 1])
    assert labels.to_lists() == [[0, 2], [1]]


def test_partition_is_canonical():
    a = Partition([[1, 0], [2]], 3)
    b = Partition([[2], [0, 1]], 3)
    assert a == b
    assert a.to_lists() == [[0, 1], [2]]


def test_partition_bookkeeping():
    p = Partition.from_labels([0, 1, 0, 2])
    assert p.num_clusters == 3
    assert p.cluster_of(2) == p.cluster_of(0)
    assert p.cluster_of(2) != p.cluster_of(1)


def test_partition_rejects_bad_covers():
    with pytest.raises(ValueError):
        Partition([[0, 1], [1, 2]], 3)  # overlap
    with pytest.raises(ValueError):
        Partition([[0], [2]], 3)  # hole at 1


# ---------------------------------------------------------------------------
# placements and feasibility


def test_new_placement_shape_and_dtype():
    x = new_placement(make_params())
    assert x.shape == (2, 2)
    assert x.dtype == np.uint8
    assert not x.any()


def test_feasible_boundaries():
    params = make_params(num_contents=4, capacity=2.0e6)  # 2 slots
    x = np.zeros((2, 4), dtype=np.uint8)
    assert feasible(x, params)
    x[0, :2] = 1
    assert feasible(x, params)
    x[0, 2] = 1
    assert not feasible(x, params)


def test_feasible_zero_capacity():
    params = make_params(capacity=0.0)
    x = np.zeros((2, 2), dtype=np.uint8)
    assert feasible(x, params)
    x[1, 1] = 1
    assert not feasible(x, params)


def test_cluster_has_or_semantics():
    part = Partition.from_labels([0, 0, 1])
    x = np.zeros((3, 2), dtype=np.uint8)
    x[1, 0] = 1
    assert cluster_has(x, part, 0, 0) == 1  # member 1 holds it
    assert cluster_has(x, part, 0, 1) == 0
    assert cluster_has(x, part, 1, 0) == 0
    # singleton cluster reduces to the matrix entry
    assert cluster_has(x, part, 1, 1) == x[2, 1]


def test_caching_energy_linear():
    params = make_params(cache_coeff=6.25e-12, content_size=4.0e9)
    x = np.zeros((2, 2), dtype=np.uint8)
    assert caching_energy(x, params) == 0.0
    x[0, 0] = 1
    assert caching_energy(x, params) == pytest.approx(0.025, rel=1e-15)
    x[1, 1] = 1
    assert caching_energy(x, params) == pytest.approx(0.05, rel=1e-15)


# ---------------------------------------------------------------------------
# per-request service model (toy2: see conftest for the rate tables)


def test_request_delay_local_hit(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    # user 0 asks for content 0: cached at its F-AP, 1e6 / 2e6
    assert request_delay(scn, rates, x, part, 0, 0) == pytest.approx(0.5)
    assert request_delay(scn, rates, x, part, 1, 1) == pytest.approx(0.25)


def test_request_delay_remote_hit(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    # user 0 asks for content 1: held only by F-AP 1, one fronthaul hop
    # 1e6 * (1/1e6 + 1/2e6) = 1.5
    assert request_delay(scn, rates, x, part, 0, 1) == pytest.approx(1.5)
    # user 1 asks for content 0: 1e6 * (1/2e6 + 1/4e6) = 0.75
    assert request_delay(scn, rates, x, part, 1, 0) == pytest.approx(0.75)


def test_request_delay_cloud(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.zeros((2, 2), dtype=np.uint8)
    # 1e6 * (1/5e5 + 1/2e6) = 2.5 and 1e6 * (1/5e5 + 1/4e6) = 2.25
    assert request_delay(scn, rates, x, part, 0, 0) == pytest.approx(2.5)
    assert request_delay(scn, rates, x, part, 1, 0) == pytest.approx(2.25)


def test_request_energy_mirrors_delay(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    assert request_energy(scn, rates, x, part, 0, 0) == pytest.approx(5.0)
    assert request_energy(scn, rates, x, part, 0, 1) == pytest.approx(15.0)
    assert request_energy(scn, rates, x, part, 1, 0) == pytest.approx(7.5)
    # cloud: 1e6 * (20/5e5 + 10/2e6) = 45
    zeros = np.zeros((2, 2), dtype=np.uint8)
    assert request_energy(scn, rates, zeros, part, 0, 0) == pytest.approx(45.0)


def test_cluster_membership_turns_remote_into_local(toy2):
    scn, rates = toy2
    whole = Partition.whole_set(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    # content 1 now sits inside user 0's cluster; the default hop is free
    assert request_delay(scn, rates, x, whole, 0, 1) == pytest.approx(0.5)


def test_charged_intra_cluster_hop(toy2):
    scn, rates = toy2
    params = scn.params
    charged = make_scenario(
        make_params(intra_cluster_hop="charged"),
        fap_pos=scn.fap_pos,
        user_pos=scn.user_pos,
        demand=scn.demand,
    )
    whole = Partition.whole_set(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    # the neighbor hop costs the same as the remote fetch
    assert request_delay(charged, rates, x, whole, 0, 1) == pytest.approx(1.5)
    assert request_energy(charged, rates, x, whole, 0, 1) == pytest.approx(15.0)
    assert params.intra_cluster_hop == "free"  # toy2 itself untouched


def test_branch_exclusivity_random_placements(small_instance):
    scn, rates = small_instance
    part = Partition.from_labels([0, 0, 1])
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = (rng.random((3, 6)) < 0.4).astype(np.uint8)
        for u in (0, 4, 8):
            for f in range(6):
                parts = delay_components(scn, rates, x, part, u, f)
                assert sum(1 for v in parts if v > 0) == 1
                eparts = energy_components(scn, rates, x, part, u, f)
                assert [v > 0 for v in eparts] == [v > 0 for v in parts]


# ---------------------------------------------------------------------------
# aggregate evaluation


def test_evaluate_toy_hand_numbers(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    res = evaluate(scn, rates, x, part)
    # T = .7*.5 + .3*1.5 + .2*.75 + .8*.25 = 1.15
    assert res.delay == pytest.approx(1.15, rel=1e-12)
    # E = Jc*L*2 + .7*5 + .3*15 + .2*7.5 + .8*2.5 = 11.5000125
    assert res.energy == pytest.approx(11.5000125, rel=1e-12)
    assert res.objective == pytest.approx(11.396512375, rel=1e-12)


def test_evaluate_empty_placement(toy2):
    scn, rates = toy2
    part = Partition.singletons(2)
    x = np.zeros((2, 2), dtype=np.uint8)
    res = evaluate(scn, rates, x, part)
    assert res.delay == pytest.approx(4.75, rel=1e-12)
    assert res.energy == pytest.approx(87.5, rel=1e-12)
    assert res.objective == pytest.approx(86.6725, rel=1e-12)


def test_evaluate_whole_set_improves_delay(toy2):
    scn, rates = toy2
    x = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    res = evaluate(scn, rates, x, Partition.whole_set(2))
    assert res.delay == pytest.approx(0.75, rel=1e-12)
    assert res.objective == pytest.approx(7.432512375, rel=1e-12)


def test_objective_is_pure_delay_at_full_weight(toy2):
    scn, rates = toy2
    heavy = make_scenario(
        make_params(weight=1.0),
        fap_pos=scn.fap_pos,
        user_pos=scn.user_pos,
        demand=scn.demand,
    )
    x = np.array([[1, 1], [0, 0]], dtype=np.uint8)  # infeasible is fine here
    res = evaluate(heavy, rates, x, Partition.singletons(2))
    assert res.objective == res.delay


def test_evaluate_matches_request_sum(small_instance):
    scn, rates = small_instance
    part = Partition.from_labels([0, 1, 1])
    rng = np.random.default_rng(11)
    ev = PlacementEvaluator(scn, rates, part)
    for _ in range(5):
        x = (rng.random((3, 6)) < 0.4).astype(np.uint8)
        res = ev.evaluate(x)
        delay = 0.0
        energy = caching_energy(x, scn.params)
        for u in range(scn.params.num_users):
            for f in range(scn.params.num_contents):
                p = scn.demand[u, f]
                delay += p * request_delay(scn, rates, x, part, u, f)
                energy += p * request_energy(scn, rates, x, part, u, f)
        assert res.delay == pytest.approx(delay, rel=1e-9)
        assert res.energy == pytest.approx(energy, rel=1e-9)


def test_local_copy_never_hurts_delay(small_instance):
    scn, rates = small_instance
    part = Partition.from_labels([0, 0, 1])
    ev = PlacementEvaluator(scn, rates, part)
    rng = np.random.default_rng(13)
    for _ in range(10):
        x = (rng.random((3, 6)) < 0.3).astype(np.uint8)
        base = ev.evaluate(x).delay
        m = int(rng.integers(0, 3))
        f = int(rng.integers(0, 6))
        y = x.copy()
        y[m, f] = 1
        assert ev.evaluate(y).delay <= base + 1e-12


def test_whole_set_brackets_singletons(small_instance):
    scn, rates = small_instance
    rng = np.random.default_rng(17)
    ev_one = PlacementEvaluator(scn, rates, Partition.whole_set(3))
    ev_solo = PlacementEvaluator(scn, rates, Partition.singletons(3))
    for _ in range(10):
        x = (rng.random((3, 6)) < 0.4).astype(np.uint8)
        assert ev_one.evaluate(x).delay <= ev_solo.evaluate(x).delay + 1e-12
