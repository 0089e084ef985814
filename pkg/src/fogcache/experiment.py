"""Experiment orchestration: parameter sweeps, scheme runs, CSV output.

One experiment cell is a (sweep value, seed) pair; each requested
scheme runs once per cell on the same scenario, rate table, and
cluster partition.  Rows come out ordered by (sweep value, seed,
scheme) exactly as configured, so two runs of the same spec produce
identical files apart from wall-clock columns (and even those can be
zeroed for byte-stable output).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, fields, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._kernels import derive_key
from .baselines import SCHEMES, exhaustive_optimal, greedy_local, random_caching
from .cache import (
    EvalResult,
    Partition,
    PlacementEvaluator,
    feasible,
)
from .firefly import FaConfig, run_fa
from .hcg import HcgConfig, run_hcg
from .radio import build_rate_table
from .scenario import SystemParams, generate_scenario
from .social import build_social_graph

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "TraceRow",
    "run_experiment",
    "write_csv",
    "write_trace_csv",
    "run_verification",
]

SWEEP_AXES = ("none", "capacity", "zipf_eta", "social_delta")
CLUSTERINGS = ("hcg", "singletons", "whole_set")

# sub-stream tags so scheme seeds never collide with the scenario seed
_TAG_HCG = 0x4C57
_TAG_FA = 0xFA11
_TAG_RANDOM = 0xBA5E


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment run."""

    system: SystemParams
    hcg: HcgConfig
    fa: FaConfig
    sweep_axis: str = "none"
    sweep_values: Tuple[float, ...] = ()
    seeds: Tuple[int, ...] = (0,)
    schemes: Tuple[str, ...] = ("improved_fa",)
    clustering: str = "hcg"
    exhaustive_cap: int = 24

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
        if self.sweep_axis != "none" and not self.sweep_values:
            raise ValueError("sweep_values must be non-empty for a sweep")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if not self.schemes:
            raise ValueError("schemes must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; choose from {SCHEMES}")
        if self.clustering not in CLUSTERINGS:
            raise ValueError(f"clustering must be one of {CLUSTERINGS}")
        if self.exhaustive_cap < 1:
            raise ValueError("exhaustive_cap must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    """One scheme outcome; field order defines the CSV header."""

    run_id: str
    seed: int
    scheme: str
    clustering: str
    C_bits: float
    eta: float
    delta: float
    mu: float
    delay_seconds: float
    energy_joules: float
    objective: float
    fa_iterations: int
    hcg_passes: int
    num_clusters: int
    wall_ms: float


@dataclass(frozen=True)
class TraceRow:
    """Optimizer incumbent at one iteration of one run."""

    run_id: str
    iteration: int
    best_objective: float
    best_delay: float
    best_energy: float


def _apply_axis(params: SystemParams, axis: str, value: Optional[float]) -> SystemParams:
    if axis == "none" or value is None:
        return params
    if axis == "capacity":
        return replace(params, capacity=float(value))
    if axis == "zipf_eta":
        return replace(params, zipf_eta=float(value))
    if axis == "social_delta":
        return replace(params, social_delta=float(value))
    raise ValueError(f"unknown sweep axis {axis!r}")


def _cell_id(axis: str, value: Optional[float], seed: int, scheme: str) -> str:
    token = "base" if value is None else f"{value:g}"
    return f"{axis}={token};seed={seed};scheme={scheme}"


def run_experiment(
    spec: ExperimentSpec,
    repeatable_timing: bool = False,
) -> Tuple[List[ResultRow], List[TraceRow]]:
    """Run every (sweep value, seed, scheme) combination sequentially.

    With ``repeatable_timing`` the wall-clock column is written as 0.0
    so repeated runs of the same spec produce identical bytes.
    """
    values: Sequence[Optional[float]]
    values = spec.sweep_values if spec.sweep_axis != "none" else (None,)
    rows: List[ResultRow] = []
    traces: List[TraceRow] = []

    for value in values:
        params = _apply_axis(spec.system, spec.sweep_axis, value)
        for seed in spec.seeds:
            scenario = generate_scenario(params, seed)
            rates = build_rate_table(scenario)
            if spec.clustering == "hcg":
                graph = build_social_graph(scenario, rates)
                hcg_cfg = replace(spec.hcg, seed=derive_key(seed, _TAG_HCG))
                hcg_res = run_hcg(graph, hcg_cfg)
                partition = hcg_res.partition
                hcg_passes = hcg_res.passes
            elif spec.clustering == "singletons":
                partition = Partition.singletons(params.num_faps)
                hcg_passes = 0
            else:
                partition = Partition.whole_set(params.num_faps)
                hcg_passes = 0
            evaluator = PlacementEvaluator(
                scenario, rates, partition, backend=spec.fa.backend
            )

            for scheme in spec.schemes:
                run_id = _cell_id(spec.sweep_axis, value, seed, scheme)
                start = time.perf_counter()
                fa_iterations = 0
                if scheme == "random":
                    x = random_caching(scenario, derive_key(seed, _TAG_RANDOM))
                    outcome = evaluator.evaluate(x)
                elif scheme == "greedy_local":
                    x = greedy_local(scenario)
                    outcome = evaluator.evaluate(x)
                elif scheme == "improved_fa":
                    fa_cfg = replace(spec.fa, seed=derive_key(seed, _TAG_FA))
                    fa_res = run_fa(scenario, rates, partition, fa_cfg)
                    x = fa_res.best_matrix
                    outcome = fa_res.best_eval
                    fa_iterations = fa_res.iterations
                    for it, (obj, t, e) in enumerate(fa_res.history):
                        traces.append(TraceRow(run_id, it, obj, t, e))
                else:  # exhaustive
                    x, outcome = exhaustive_optimal(
                        scenario, rates, partition,
                        size_cap=spec.exhaustive_cap, backend=spec.fa.backend,
                    )
                wall = 0.0 if repeatable_timing else (
                    (time.perf_counter() - start) * 1000.0
                )
                if not feasible(x, params):
                    raise AssertionError(f"{scheme} produced an infeasible placement")
                _check_mix(outcome, params.weight)
                rows.append(
                    ResultRow(
                        run_id=run_id,
                        seed=int(seed),
                        scheme=scheme,
                        clustering=spec.clustering,
                        C_bits=float(params.capacity),
                        eta=float(params.zipf_eta),
                        delta=float(params.social_delta),
                        mu=float(params.weight),
                        delay_seconds=outcome.delay,
                        energy_joules=outcome.energy,
                        objective=outcome.objective,
                        fa_iterations=fa_iterations,
                        hcg_passes=hcg_passes,
                        num_clusters=partition.num_clusters,
                        wall_ms=wall,
                    )
                )
    return rows, traces


def _check_mix(outcome: EvalResult, mu: float) -> None:
    blended = mu * outcome.delay + (1.0 - mu) * outcome.energy
    scale = max(abs(blended), 1.0)
    if abs(blended - outcome.objective) > 1e-9 * scale:
        raise AssertionError("objective drifted from its delay/energy mix")


def _fmt(value) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans have no CSV format")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value.is_integer() and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return str(value)


def _write_table(path: str, header: Sequence[str], rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def write_csv(rows: Sequence[ResultRow], path: str) -> None:
    """Write result rows with a fixed header, one line per row."""
    header = [f.name for f in fields(ResultRow)]
    data = (
        [getattr(row, name) for name in header]
        for row in rows
    )
    _write_table(path, header, data)


def write_trace_csv(traces: Sequence[TraceRow], path: str) -> None:
    """Write per-iteration optimizer traces."""
    header = [f.name for f in fields(TraceRow)]
    data = ([getattr(t, name) for name in header] for t in traces)
    _write_table(path, header, data)


# ---------------------------------------------------------------------------
# Self-check battery for the verify subcommand.


def run_verification(spec: ExperimentSpec) -> List[Tuple[str, bool, str]]:
    """Cheap invariant battery over the configured system.

    Returns (check name, passed, detail) triples.  Heavy consistency
    checks run on a scaled-down copy of the system so the battery stays
    fast at full scale.
    """
    from .cache import request_delay, request_energy  # local import, test-style use

    checks: List[Tuple[str, bool, str]] = []
    params = spec.system
    seed = spec.seeds[0]
    value = spec.sweep_values[0] if spec.sweep_axis != "none" else None
    params = _apply_axis(params, spec.sweep_axis, value)

    # scenario determinism and geometry invariants
    sc = generate_scenario(params, seed)
    sc2 = generate_scenario(params, seed)
    same = (
        np.array_equal(sc.fap_pos, sc2.fap_pos)
        and np.array_equal(sc.user_pos, sc2.user_pos)
        and np.array_equal(sc.demand, sc2.demand)
    )
    in_box = bool(
        np.all(sc.fap_pos >= 0) and np.all(sc.fap_pos <= params.side_length)
        and np.all(sc.user_pos >= 0) and np.all(sc.user_pos <= params.side_length)
    )
    rows_ok = bool(
        np.all(sc.demand >= 0)
        and np.allclose(sc.demand.sum(axis=1), 1.0, rtol=0, atol=1e-9)
    )
    diff = sc.user_pos[:, None, :] - sc.fap_pos[None, :, :]
    nearest = np.argmin(np.sqrt((diff * diff).sum(axis=2)), axis=1)
    local_ok = bool(np.array_equal(nearest, sc.local_fap))
    ok = same and in_box and rows_ok and local_ok
    checks.append(("scenario", ok, "deterministic, in-box, rows sum to 1"))

    # rate table sanity and scalar agreement
    from .radio import access_rate, coop_rate

    rates = build_rate_table(sc)
    ok = bool(np.all(rates.access > 0))
    off = ~np.eye(params.num_faps, dtype=bool)
    ok = ok and bool(np.all(rates.coop[off] > 0))
    probe = np.random.default_rng(0)
    for _ in range(5):
        m = int(probe.integers(params.num_faps))
        u = int(probe.integers(params.num_users))
        ok = ok and np.isclose(
            access_rate(sc, m, u), rates.access[m, u], rtol=1e-12, atol=0
        )
    if params.num_faps > 1:
        m, n = 0, params.num_faps - 1
        ok = ok and np.isclose(
            coop_rate(sc, m, n), rates.coop[m, n], rtol=1e-12, atol=0
        )
    checks.append(("rates", bool(ok), "positive, table matches scalar model"))

    # social graph structure
    graph = build_social_graph(sc, rates)
    ok = bool(
        np.allclose(graph.mutual, graph.mutual.T)
        and np.all(np.diagonal(graph.mutual) == 0)
        and np.all(np.isfinite(graph.mutual))
    )
    checks.append(("social-graph", ok, "symmetric, zero diagonal, finite"))

    # clustering invariants
    from .hcg import is_individually_stable

    hcg_res = run_hcg(graph, replace(spec.hcg, seed=derive_key(seed, _TAG_HCG)))
    gaps = np.diff(hcg_res.potential_history)
    ok = hcg_res.converged and is_individually_stable(graph, hcg_res.partition)
    if gaps.size:
        ok = ok and bool(np.all(gaps > 0))
    checks.append(
        (
            "clustering",
            bool(ok),
            f"converged in {hcg_res.passes} passes, "
            f"{hcg_res.partition.num_clusters} clusters, welfare rises per move",
        )
    )

    # objective consistency on a scaled-down system
    small = replace(
        params,
        num_faps=min(params.num_faps, 4),
        num_users=min(params.num_users, 12),
        num_contents=min(params.num_contents, 8),
        capacity=2.0 * params.content_size,
    )
    ssc = generate_scenario(small, seed)
    srates = build_rate_table(ssc)
    sgraph = build_social_graph(ssc, srates)
    spart = run_hcg(sgraph, replace(spec.hcg, seed=derive_key(seed, _TAG_HCG))).partition
    evaluator = PlacementEvaluator(ssc, srates, spart)
    rng = np.random.default_rng(derive_key(seed, 0x5E1F) & (2**63 - 1))
    ok = True
    for _ in range(5):
        x = (rng.random((small.num_faps, small.num_contents)) < 0.4).astype(np.uint8)
        res = evaluator.evaluate(x)
        t = sum(
            ssc.demand[u, f] * request_delay(ssc, srates, x, spart, u, f)
            for u in range(small.num_users)
            for f in range(small.num_contents)
        )
        e = sum(
            ssc.demand[u, f] * request_energy(ssc, srates, x, spart, u, f)
            for u in range(small.num_users)
            for f in range(small.num_contents)
        )
        from .cache import caching_energy

        e += caching_energy(x, small)
        ok = ok and np.isclose(res.delay, t, rtol=1e-9, atol=0)
        ok = ok and np.isclose(res.energy, e, rtol=1e-9, atol=0)
    checks.append(
        ("objective", bool(ok), "aggregated totals match the per-request sums")
    )

    # scheme outputs stay feasible and beat nothing they should not
    xr = random_caching(ssc, derive_key(seed, _TAG_RANDOM))
    xg = greedy_local(ssc)
    fa_small = replace(spec.fa, max_iters=min(spec.fa.max_iters, 20),
                       seed=derive_key(seed, _TAG_FA))
    fa_res = run_fa(ssc, srates, spart, fa_small)
    ok = (
        feasible(xr, small)
        and feasible(xg, small)
        and feasible(fa_res.best_matrix, small)
    )
    hist = fa_res.objectives
    ok = ok and bool(np.all(np.diff(hist) <= 0))
    fa_res2 = run_fa(ssc, srates, spart, fa_small)
    ok = ok and np.array_equal(fa_res.best_matrix, fa_res2.best_matrix)
    ok = ok and fa_res.best_eval.objective == fa_res2.best_eval.objective
    checks.append(
        ("optimizer", bool(ok), "feasible, monotone incumbent, deterministic")
    )

    if small.num_faps * small.num_contents <= spec.exhaustive_cap:
        _, eo = exhaustive_optimal(ssc, srates, spart, spec.exhaustive_cap)
        ok = eo.objective <= fa_res.best_eval.objective + 1e-12
        checks.append(("oracle", bool(ok), "exhaustive optimum dominates"))
    return checks
