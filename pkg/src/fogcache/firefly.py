"""Binary firefly search over cache placements.

A swarm of feasible placements evolves for a fixed number of
iterations.  Brighter (lower objective) fireflies attract dimmer ones;
attraction decays with Hamming distance.  Moves are thresholded to
binary and immediately visible within the same iteration, so one
firefly can be pulled by an already-updated peer.  After moving, a
firefly is repaired to the capacity budget with a popularity-guided
rule.  The best placement ever seen is kept outside the swarm, so the
reported history never worsens.

All randomness inside the main loop is counter-based (keyed by
iteration, firefly, and element), which makes runs reproducible and
backend-independent; see :mod:`fogcache._kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ._kernels import derive_key, get_backend
from .cache import EvalResult, Partition, PlacementEvaluator, feasible
from .radio import LinkRateTable
from .scenario import Scenario, all_local_popularity, capacity_slots

__all__ = [
    "FaConfig",
    "FaResult",
    "brightness_normalize",
    "attractiveness",
    "move_firefly",
    "repair",
    "run_fa",
]

_MASK64 = (1 << 64) - 1
_STREAM_INIT = 0xF1
_STREAM_MOVE = 0xF2


@dataclass(frozen=True)
class FaConfig:
    """Swarm size, iteration budget, and move/repair behavior."""

    population: int = 30
    max_iters: int = 200
    gamma: float = 0.001  # attractiveness decay per unit Hamming distance
    lambda_rand: float = 0.5  # randomization strength
    seed: int = 0
    stall_limit: Optional[int] = None  # stop after this many flat iterations
    repair_fill: str = "full"  # "full" tops caches up, "none" only evicts
    epsilon_scope: str = "element"  # fresh noise per element or per matrix
    backend: Optional[str] = None  # None/auto, "numba", "numpy"

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.lambda_rand < 0:
            raise ValueError("lambda_rand must be non-negative")
        if self.stall_limit is not None and self.stall_limit < 1:
            raise ValueError("stall_limit must be >= 1 when set")
        if self.repair_fill not in ("full", "none"):
            raise ValueError("repair_fill must be 'full' or 'none'")
        if self.epsilon_scope not in ("element", "matrix"):
            raise ValueError("epsilon_scope must be 'element' or 'matrix'")


@dataclass
class FaResult:
    """Best placement found plus the per-iteration incumbent trace.

    ``history`` holds one (objective, delay, energy) triple per
    recorded point: the initial swarm and then one per iteration run.
    """

    best_matrix: np.ndarray
    best_eval: EvalResult
    history: List[Tuple[float, float, float]]
    iterations: int
    population: List[np.ndarray] = field(default_factory=list)

    @property
    def objectives(self) -> np.ndarray:
        return np.asarray([h[0] for h in self.history])


def brightness_normalize(objectives: np.ndarray) -> np.ndarray:
    """Map objectives to brightness in [0, 1], best (lowest) brightest.

    A degenerate swarm where every firefly scores the same maps to all
    zeros.
    """
    objectives = np.asarray(objectives, dtype=float)
    worst = objectives.max()
    best = objectives.min()
    return (worst - objectives) / (worst - best + 1e-12)


def attractiveness(intensity: float, distance: float, gamma: float) -> float:
    """Pull exerted by a firefly of given brightness at a given distance."""
    return intensity * math.exp(-gamma * distance)


def move_firefly(
    xj: np.ndarray,
    xi: np.ndarray,
    beta: float,
    lam: float,
    rng: np.random.Generator,
    epsilon_scope: str = "element",
) -> np.ndarray:
    """Reference move: pull placement xj toward xi, then threshold.

    Each element becomes 1 iff
    ``xj + beta * (xi - xj) + lam * (eps - 1/2) - 1/2 >= 0``
    with eps uniform on [0, 1).  This is the generator-driven public
    form; the optimizer's inner loop uses the counter-based kernels.
    """
    if xj.shape != xi.shape:
        raise ValueError("placements must share a shape")
    if epsilon_scope == "element":
        eps = rng.random(xj.shape)
    else:
        eps = float(rng.random())
    a = xj.astype(np.float64)
    b = xi.astype(np.float64)
    arg = a + beta * (b - a)
    arg = arg + lam * (eps - 0.5)
    arg = arg - 0.5
    return (arg >= 0.0).astype(np.uint8)


def repair(
    row: np.ndarray,
    local_pop: np.ndarray,
    slots: int,
    fill: str = "full",
) -> np.ndarray:
    """Return a copy of one cache row trimmed or topped up to ``slots``.

    Priority is local popularity, ties broken toward the lower content
    id.  Over budget, only the ``slots`` highest-priority cached
    contents survive; under budget with ``fill="full"``, the highest
    priority uncached contents are added until the cache is full.
    """
    if row.shape != local_pop.shape:
        raise ValueError("row and popularity must share a shape")
    prio = np.argsort(-local_pop, kind="stable")
    out = row.astype(np.uint8).copy()
    kept = 0
    for f in prio:
        if out[f]:
            if kept < slots:
                kept += 1
            else:
                out[f] = 0
    if fill == "full":
        for f in prio:
            if kept >= slots:
                break
            if not out[f]:
                out[f] = 1
                kept += 1
    return out


def _initial_swarm(
    scenario: Scenario,
    pop_rows: np.ndarray,
    slots: int,
    count: int,
    seed: int,
) -> List[np.ndarray]:
    """Seed fireflies with popularity-weighted feasible placements."""
    params = scenario.params
    rng = np.random.default_rng([seed & _MASK64, _STREAM_INIT])
    uniform = np.full(params.num_contents, 1.0 / params.num_contents)
    swarm = []
    for _ in range(count):
        x = np.zeros((params.num_faps, params.num_contents), dtype=np.uint8)
        if slots:
            for m in range(params.num_faps):
                weights = pop_rows[m] if pop_rows[m].sum() > 0 else uniform
                chosen = rng.choice(
                    params.num_contents, size=slots, replace=False, p=weights
                )
                x[m, chosen] = 1
        swarm.append(x)
    return swarm


def run_fa(
    scenario: Scenario,
    rates: LinkRateTable,
    partition: Partition,
    config: Optional[FaConfig] = None,
) -> FaResult:
    """Optimize a cache placement for one scenario and partition."""
    if config is None:
        config = FaConfig()
    params = scenario.params
    be = get_backend(config.backend)
    evaluator = PlacementEvaluator(scenario, rates, partition, backend=config.backend)
    slots = capacity_slots(params)
    pop_rows = all_local_popularity(scenario)
    # repair priority: most locally popular first, index breaks ties
    prio = np.argsort(-pop_rows, axis=1, kind="stable").astype(np.int64)
    fill = config.repair_fill == "full"
    per_element = config.epsilon_scope == "element"

    swarm = _initial_swarm(scenario, pop_rows, slots, config.population, config.seed)
    for x in swarm:
        be.repair(x, prio, slots, fill)
    evals = [evaluator.evaluate(x) for x in swarm]
    objectives = np.asarray([e.objective for e in evals])

    best_idx = int(np.argmin(objectives))
    best_eval = evals[best_idx]
    best_matrix = swarm[best_idx].copy()
    history: List[Tuple[float, float, float]] = [
        (best_eval.objective, best_eval.delay, best_eval.energy)
    ]

    lam = config.lambda_rand
    stall = 0
    iterations = 0
    for q in range(config.max_iters):
        iterations = q + 1
        intensity = brightness_normalize(objectives)
        for j in range(config.population):
            xj = swarm[j].reshape(-1)
            for i in range(config.population):
                if intensity[j] >= intensity[i]:
                    continue
                r = be.hamming(xj, swarm[i].reshape(-1))
                beta = attractiveness(float(intensity[i]), float(r), config.gamma)
                key = np.uint64(derive_key(config.seed, _STREAM_MOVE, q, j, i))
                be.move(xj, swarm[i].reshape(-1), beta, lam, key, per_element)
            be.repair(swarm[j], prio, slots, fill)
        improved = False
        for j in range(config.population):
            evals[j] = evaluator.evaluate(swarm[j])
            objectives[j] = evals[j].objective
            if objectives[j] < best_eval.objective:
                best_eval = evals[j]
                best_matrix = swarm[j].copy()
                improved = True
        if not all(feasible(x, params) for x in swarm):
            raise AssertionError("swarm left the capacity region")
        history.append((best_eval.objective, best_eval.delay, best_eval.energy))
        stall = 0 if improved else stall + 1
        if config.stall_limit is not None and stall >= config.stall_limit:
            break

    return FaResult(
        best_matrix=best_matrix,
        best_eval=best_eval,
        history=history,
        iterations=iterations,
        population=swarm,
    )
