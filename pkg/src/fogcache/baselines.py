"""Reference placement schemes: random, popularity-greedy, exhaustive.

The exhaustive scheme enumerates every feasible placement and is the
ground-truth optimum for small instances; the other two are the cheap
baselines the optimizer is judged against.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Optional, Tuple

import numpy as np

from .cache import EvalResult, Partition, PlacementEvaluator, new_placement
from .radio import LinkRateTable
from .scenario import Scenario, all_local_popularity, capacity_slots

__all__ = [
    "SCHEMES",
    "random_caching",
    "greedy_local",
    "exhaustive_optimal",
]

_MASK64 = (1 << 64) - 1

SCHEMES = ("random", "greedy_local", "improved_fa", "exhaustive")


def random_caching(scenario: Scenario, seed: int) -> np.ndarray:
    """Each F-AP caches a uniform random subset that fills its budget."""
    params = scenario.params
    slots = capacity_slots(params)
    rng = np.random.default_rng([seed & _MASK64, 0xBA5E])
    x = new_placement(params)
    if slots:
        for m in range(params.num_faps):
            chosen = rng.choice(params.num_contents, size=slots, replace=False)
            x[m, chosen] = 1
    return x


def greedy_local(scenario: Scenario) -> np.ndarray:
    """Each F-AP caches its locally most popular contents.

    Ties, including the all-tied rows of F-APs without users, resolve
    toward the lower content id.
    """
    params = scenario.params
    slots = capacity_slots(params)
    x = new_placement(params)
    if slots:
        pop = all_local_popularity(scenario)
        order = np.argsort(-pop, axis=1, kind="stable")
        for m in range(params.num_faps):
            x[m, order[m, :slots]] = 1
    return x


def exhaustive_optimal(
    scenario: Scenario,
    rates: LinkRateTable,
    partition: Partition,
    size_cap: int = 24,
    backend: Optional[str] = None,
) -> Tuple[np.ndarray, EvalResult]:
    """Optimal placement by full enumeration.

    Visits every combination of per-row subsets within the slot budget;
    cost grows as a product of binomial sums, so instances with
    ``M * F > size_cap`` are refused.  Objective ties resolve to the
    lexicographically smallest flattened matrix, making the result
    unique and reproducible.
    """
    params = scenario.params
    cells = params.num_faps * params.num_contents
    if cells > size_cap:
        raise ValueError(
            f"instance has {cells} cells, exhaustive search capped at {size_cap}"
        )
    slots = capacity_slots(params)
    evaluator = PlacementEvaluator(scenario, rates, partition, backend=backend)

    row_choices = []
    for s in range(slots + 1):
        row_choices.extend(combinations(range(params.num_contents), s))

    best_x: Optional[np.ndarray] = None
    best_eval: Optional[EvalResult] = None
    best_key: Optional[tuple] = None
    x = new_placement(params)
    for rows in product(row_choices, repeat=params.num_faps):
        x.fill(0)
        for m, chosen in enumerate(rows):
            for f in chosen:
                x[m, f] = 1
        result = evaluator.evaluate(x)
        key = tuple(x.reshape(-1))
        if (
            best_eval is None
            or result.objective < best_eval.objective
            or (result.objective == best_eval.objective and key < best_key)
        ):
            best_x = x.copy()
            best_eval = result
            best_key = key
    assert best_x is not None and best_eval is not None
    return best_x, best_eval
