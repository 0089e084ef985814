"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the three hot kernels and one full optimizer pass on a full-scale
scenario with both backends and prints a comparison table.  The numpy
path is the one selected by FOGCACHE_DISABLE_NUMBA=1; here both are
loaded side by side and verified to agree bit for bit before timing.

Usage: python benchmarks/bench_kernels.py [--iters N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fogcache import (
    FaConfig,
    HcgConfig,
    PlacementEvaluator,
    SystemParams,
    build_rate_table,
    build_social_graph,
    generate_scenario,
    greedy_local,
    run_fa,
    run_hcg,
)
from fogcache._kernels import HAS_NUMBA, derive_key, get_backend
from fogcache.scenario import all_local_popularity, capacity_slots


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iters", type=int, default=5,
                        help="timing repeats per kernel (best-of)")
    parser.add_argument("--fa-iters", type=int, default=30,
                        help="optimizer iterations for the end-to-end row")
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba is not available in this process; nothing to compare")
        return 1

    params = SystemParams()
    scenario = generate_scenario(params, 0)
    rates = build_rate_table(scenario)
    graph = build_social_graph(scenario, rates)
    partition = run_hcg(graph, HcgConfig(seed=1)).partition
    slots = capacity_slots(params)
    pop = all_local_popularity(scenario)
    prio = np.argsort(-pop, axis=1, kind="stable").astype(np.int64)
    x = greedy_local(scenario)
    x_flat_a = x.reshape(-1).copy()
    rng = np.random.default_rng(7)
    x_flat_b = x_flat_a.copy()
    flip = rng.choice(x_flat_b.size, 500, replace=False)
    x_flat_b[flip] ^= 1

    nb = get_backend("numba")
    np_ = get_backend("numpy")
    evaluators = {
        "numba": PlacementEvaluator(scenario, rates, partition, backend="numba"),
        "numpy": PlacementEvaluator(scenario, rates, partition, backend="numpy"),
    }

    # agreement first, timings second
    ea = evaluators["numba"].evaluate(x)
    eb = evaluators["numpy"].evaluate(x)
    assert ea == eb, "backend evaluations disagree"
    key = np.uint64(derive_key(42, 1, 2, 3))
    ma, mb = x_flat_a.copy(), x_flat_a.copy()
    nb.move(ma, x_flat_b, 0.6, 1.0, key, True)
    np_.move(mb, x_flat_b, 0.6, 1.0, key, True)
    assert np.array_equal(ma, mb), "backend moves disagree"
    ra, rb = x.copy(), x.copy()
    ra[0, :] = 1
    rb[0, :] = 1
    nb.repair(ra, prio, slots, True)
    np_.repair(rb, prio, slots, True)
    assert np.array_equal(ra, rb), "backend repairs disagree"
    print("backends agree bit-for-bit on evaluate/move/repair\n")

    rows = []
    for name, be in (("numba", nb), ("numpy", np_)):
        ev = evaluators[name]
        t_eval = time_call(lambda: ev.evaluate(x), args.iters)
        t_ham = time_call(lambda: be.hamming(x_flat_a, x_flat_b), args.iters)

        def one_move():
            buf = x_flat_a.copy()
            be.move(buf, x_flat_b, 0.6, 1.0, key, True)

        t_move = time_call(one_move, args.iters)

        def one_repair():
            buf = x.copy()
            buf[0, :] = 1
            be.repair(buf, prio, slots, True)

        t_rep = time_call(one_repair, args.iters)
        rows.append((name, t_eval, t_ham, t_move, t_rep))

    print(f"{'backend':<8} {'evaluate':>12} {'hamming':>12} {'move':>12} {'repair':>12}")
    for name, t_eval, t_ham, t_move, t_rep in rows:
        print(
            f"{name:<8} {t_eval * 1e3:>10.3f}ms {t_ham * 1e6:>10.1f}us "
            f"{t_move * 1e6:>10.1f}us {t_rep * 1e6:>10.1f}us"
        )
    base = rows[1]
    fast = rows[0]
    print("\nspeedups (numpy / numba):")
    for label, i in (("evaluate", 1), ("hamming", 2), ("move", 3), ("repair", 4)):
        print(f"  {label}: {base[i] / fast[i]:.1f}x")

    print("\nfull optimizer run (population 30):")
    for name in ("numba", "numpy"):
        cfg = FaConfig(population=30, max_iters=args.fa_iters, lambda_rand=1.0,
                       seed=123, backend=name)
        t0 = time.perf_counter()
        res = run_fa(scenario, rates, partition, cfg)
        dt = time.perf_counter() - t0
        print(f"  {name}: {dt:.2f}s, best objective {res.best_eval.objective:.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
