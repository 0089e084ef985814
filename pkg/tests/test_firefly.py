"""Swarm optimizer: brightness, moves, repair, and full runs."""

import math

import numpy as np
import pytest

from fogcache import (
    FaConfig,
    Partition,
    attractiveness,
    brightness_normalize,
    evaluate,
    feasible,
    move_firefly,
    repair,
    run_fa,
)
from fogcache._kernels import get_backend

from conftest import make_params, make_rates, make_scenario


# ---------------------------------------------------------------------------
# brightness and attraction


def test_brightness_constant_swarm_is_dark():
    assert brightness_normalize(np.array([5.0, 5.0, 5.0])).tolist() == [0, 0, 0]


def test_brightness_two_point():
    b = brightness_normalize(np.array([1.0, 3.0]))
    assert b[0] == pytest.approx(1.0, rel=1e-9)
    assert b[1] == 0.0


def test_brightness_affine_map():
    b = brightness_normalize(np.array([2.0, 4.0, 6.0]))
    assert b[0] == pytest.approx(1.0, rel=1e-9)
    assert b[1] == pytest.approx(0.5, rel=1e-9)
    assert b[2] == 0.0


def test_attractiveness_limits():
    assert attractiveness(0.8, 1234.0, 0.0) == 0.8
    assert attractiveness(0.8, 0.0, 0.05) == 0.8
    assert attractiveness(0.5, 100.0, 0.001) == pytest.approx(
        0.45241870901797976, rel=1e-15
    )
    # decreasing in distance
    assert attractiveness(1.0, 10.0, 0.1) > attractiveness(1.0, 20.0, 0.1)


# ---------------------------------------------------------------------------
# the move rule


def test_move_keeps_shared_ones_without_noise():
    xj = np.ones((2, 3), dtype=np.uint8)
    xi = np.ones((2, 3), dtype=np.uint8)
    out = move_firefly(xj, xi, beta=0.9, lam=0.0, rng=np.random.default_rng(0))
    assert out.tolist() == xj.tolist()


def test_move_threshold_on_beta():
    xj = np.zeros((1, 1), dtype=np.uint8)
    xi = np.ones((1, 1), dtype=np.uint8)
    rng = np.random.default_rng(0)
    # argument beta - 1/2: 0.2 stays below, 0.6 crosses
    assert move_firefly(xj, xi, 0.2, 0.0, rng)[0, 0] == 0
    assert move_firefly(xj, xi, 0.6, 0.0, rng)[0, 0] == 1


def test_move_identity_when_inert():
    rng = np.random.default_rng(3)
    xj = rng.integers(0, 2, size=(4, 9)).astype(np.uint8)
    xi = rng.integers(0, 2, size=(4, 9)).astype(np.uint8)
    out = move_firefly(xj, xi, beta=0.0, lam=0.0, rng=rng)
    assert np.array_equal(out, xj)


def test_move_copies_fully_at_max_attraction():
    xj = np.zeros((3, 5), dtype=np.uint8)
    xi = np.ones((3, 5), dtype=np.uint8)
    out = move_firefly(xj, xi, beta=1.0, lam=0.0, rng=np.random.default_rng(0))
    assert np.array_equal(out, xi)


def test_move_shape_mismatch():
    with pytest.raises(ValueError):
        move_firefly(
            np.zeros((2, 2), dtype=np.uint8),
            np.zeros((2, 3), dtype=np.uint8),
            0.5,
            0.5,
            np.random.default_rng(0),
        )


def test_move_is_deterministic_given_state():
    xj = np.zeros((2, 8), dtype=np.uint8)
    xi = np.ones((2, 8), dtype=np.uint8)
    a = move_firefly(xj, xi, 0.4, 1.5, np.random.default_rng(42))
    b = move_firefly(xj, xi, 0.4, 1.5, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_move_matrix_scope_flips_together():
    # one shared draw: every equal-state element gets the same outcome
    xj = np.zeros((1, 64), dtype=np.uint8)
    xi = np.zeros((1, 64), dtype=np.uint8)
    out = move_firefly(
        xj, xi, 0.0, 2.0, np.random.default_rng(1), epsilon_scope="matrix"
    )
    assert out.min() == out.max()


# ---------------------------------------------------------------------------
# repair


def test_repair_noop_at_capacity():
    row = np.array([1, 0, 1, 0], dtype=np.uint8)
    pop = np.array([0.4, 0.3, 0.2, 0.1])
    assert np.array_equal(repair(row, pop, 2), row)


def test_repair_evicts_least_popular():
    # cached {0,1,2} with pop .5 > .3 > .2, two slots -> {0,1}
    row = np.array([1, 1, 1, 0], dtype=np.uint8)
    pop = np.array([0.5, 0.3, 0.2, 0.0])
    assert repair(row, pop, 2).tolist() == [1, 1, 0, 0]


def test_repair_fills_by_popularity():
    # nothing cached, ranking c > a > b -> {c, a}
    row = np.array([0, 0, 0], dtype=np.uint8)
    pop = np.array([0.3, 0.1, 0.6])  # a=0, b=1, c=2
    assert repair(row, pop, 2).tolist() == [1, 0, 1]


def test_repair_tie_breaks_toward_low_index():
    row = np.array([0, 0, 0, 0], dtype=np.uint8)
    pop = np.array([0.25, 0.25, 0.25, 0.25])
    assert repair(row, pop, 2).tolist() == [1, 1, 0, 0]


def test_repair_evict_only_mode():
    row = np.array([1, 0, 0, 0], dtype=np.uint8)
    pop = np.array([0.1, 0.2, 0.3, 0.4])
    assert repair(row, pop, 3, fill="none").tolist() == [1, 0, 0, 0]
    over = np.array([1, 1, 1, 1], dtype=np.uint8)
    assert repair(over, pop, 2, fill="none").tolist() == [0, 0, 1, 1]


def test_repair_is_idempotent():
    rng = np.random.default_rng(9)
    for _ in range(20):
        row = rng.integers(0, 2, size=12).astype(np.uint8)
        pop = rng.random(12)
        once = repair(row, pop, 4)
        assert np.array_equal(repair(once, pop, 4), once)
        assert once.sum() == 4


def test_repair_agrees_with_batch_kernel():
    be = get_backend("numpy")
    rng = np.random.default_rng(21)
    rows = rng.integers(0, 2, size=(6, 10)).astype(np.uint8)
    pop = rng.random((6, 10))
    prio = np.argsort(-pop, axis=1, kind="stable").astype(np.int64)
    batch = rows.copy()
    be.repair(batch, prio, 3, True)
    for m in range(6):
        assert np.array_equal(batch[m], repair(rows[m], pop[m], 3))


# ---------------------------------------------------------------------------
# full runs


def one_fap_instance(demand_row, capacity=1.0e6):
    params = make_params(
        num_faps=1,
        num_users=1,
        num_contents=len(demand_row),
        capacity=capacity,
    )
    scn = make_scenario(
        params, fap_pos=[[0.0, 0.0]], user_pos=[[50.0, 0.0]], demand=[demand_row]
    )
    rates = make_rates(access=[[1.0e6]], coop=[[0.0]])
    return scn, rates


def test_run_fa_finds_single_slot_optimum():
    scn, rates = one_fap_instance([0.6, 0.3, 0.1])
    part = Partition.singletons(1)
    cfg = FaConfig(population=6, max_iters=15, lambda_rand=2.0, seed=0)
    res = run_fa(scn, rates, part, cfg)
    assert res.best_matrix.tolist() == [[1, 0, 0]]
    # brute force over the three single-slot placements agrees
    objs = []
    for f in range(3):
        x = np.zeros((1, 3), dtype=np.uint8)
        x[0, f] = 1
        objs.append(evaluate(scn, rates, x, part).objective)
    assert res.best_eval.objective == pytest.approx(min(objs), rel=1e-12)


def test_run_fa_degenerate_swarm_stays_put():
    # two contents, two slots: repair fills every firefly to all-ones,
    # so the swarm is uniform from the start and nothing can move
    scn, rates = one_fap_instance([0.7, 0.3], capacity=2.0e6)
    part = Partition.singletons(1)
    cfg = FaConfig(population=4, max_iters=5, seed=1)
    res = run_fa(scn, rates, part, cfg)
    assert res.best_matrix.tolist() == [[1, 1]]
    assert all(x.tolist() == [[1, 1]] for x in res.population)
    objs = [h[0] for h in res.history]
    assert objs == [objs[0]] * len(objs)


def test_run_fa_history_is_non_increasing(small_instance):
    scn, rates = small_instance
    part = Partition.from_labels([0, 0, 1])
    cfg = FaConfig(population=10, max_iters=25, lambda_rand=2.0, seed=3)
    res = run_fa(scn, rates, part, cfg)
    objs = [h[0] for h in res.history]
    assert all(b <= a for a, b in zip(objs, objs[1:]))
    assert res.best_eval.objective == objs[-1]
    mu = scn.params.weight
    blend = mu * res.best_eval.delay + (1 - mu) * res.best_eval.energy
    assert res.best_eval.objective == pytest.approx(blend, rel=1e-12)


def test_run_fa_population_is_feasible(small_instance):
    scn, rates = small_instance
    part = Partition.singletons(3)
    res = run_fa(scn, rates, part, FaConfig(population=8, max_iters=10, seed=2))
    assert feasible(res.best_matrix, scn.params)
    assert all(feasible(x, scn.params) for x in res.population)


def test_run_fa_deterministic_per_seed(small_instance):
    scn, rates = small_instance
    part = Partition.from_labels([0, 1, 1])
    cfg = FaConfig(population=6, max_iters=8, lambda_rand=2.0, seed=11)
    a = run_fa(scn, rates, part, cfg)
    b = run_fa(scn, rates, part, cfg)
    assert np.array_equal(a.best_matrix, b.best_matrix)
    assert a.history == b.history
    c = run_fa(scn, rates, part, FaConfig(
        population=6, max_iters=8, lambda_rand=2.0, seed=12
    ))
    assert a.history != c.history


def test_run_fa_stall_limit_stops_early():
    scn, rates = one_fap_instance([0.7, 0.3], capacity=2.0e6)
    part = Partition.singletons(1)
    res = run_fa(
        scn, rates, part,
        FaConfig(population=4, max_iters=50, stall_limit=3, seed=0),
    )
    assert res.iterations == 3
    assert len(res.history) == res.iterations + 1


def test_fa_config_validation():
    with pytest.raises(ValueError):
        FaConfig(population=1)
    with pytest.raises(ValueError):
        FaConfig(max_iters=0)
    with pytest.raises(ValueError):
        FaConfig(lambda_rand=-0.5)
    with pytest.raises(ValueError):
        FaConfig(repair_fill="pad")
    with pytest.raises(ValueError):
        FaConfig(epsilon_scope="row")
