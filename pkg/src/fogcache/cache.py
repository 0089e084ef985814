"""Cache placement model: feasibility, per-request cost, and the
delay/energy objective.

A placement is a binary matrix X of shape (M, F); X[m, f] = 1 means
F-AP m caches content f.  Row sums are limited by the cache capacity.
Each user request falls into exactly one service regime:

* hit inside the user's local cluster: one access-link transfer;
* hit in some other cluster: one fronthaul hop from the best-rate
  holder plus the access-link transfer;
* miss everywhere: a cloud fetch plus the access-link transfer.

Energy mirrors delay (transmit power times transfer time) plus a
placement-wide caching energy proportional to the number of cached
bits.  The scalar objective blends delay and energy with weight ``mu``:
``mu * delay + (1 - mu) * energy``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ._kernels import Backend, get_backend
from .radio import LinkRateTable
from .scenario import Scenario, SystemParams, capacity_slots, local_demand_mass

__all__ = [
    "Partition",
    "EvalResult",
    "new_placement",
    "capacity_slots",
    "feasible",
    "cluster_has",
    "delay_components",
    "energy_components",
    "request_delay",
    "request_energy",
    "caching_energy",
    "PlacementEvaluator",
    "evaluate",
]


class Partition:
    """A disjoint, exhaustive grouping of the F-APs into clusters.

    Clusters are kept in canonical form: members sorted ascending and
    clusters ordered by their smallest member, so two partitions with
    the same grouping compare equal.
    """

    def __init__(self, clusters: Iterable[Iterable[int]], num_faps: int):
        raw = [sorted(int(m) for m in c) for c in clusters]
        raw = [c for c in raw if c]
        raw.sort(key=lambda c: c[0])
        seen: set = set()
        for c in raw:
            for m in c:
                if not 0 <= m < num_faps:
                    raise ValueError(f"F-AP index {m} out of range")
                if m in seen:
                    raise ValueError(f"F-AP {m} appears in more than one cluster")
                seen.add(m)
        if len(seen) != num_faps:
            missing = sorted(set(range(num_faps)) - seen)
            raise ValueError(f"F-APs {missing} belong to no cluster")
        self.num_faps = num_faps
        self.clusters: List[np.ndarray] = [np.asarray(c, dtype=np.int64) for c in raw]
        member_of = np.empty(num_faps, dtype=np.int64)
        for k, c in enumerate(self.clusters):
            member_of[c] = k
        self.member_of = member_of

    @classmethod
    def singletons(cls, num_faps: int) -> "Partition":
        return cls([[m] for m in range(num_faps)], num_faps)

    @classmethod
    def whole_set(cls, num_faps: int) -> "Partition":
        return cls([list(range(num_faps))], num_faps)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        labels = np.asarray(labels)
        groups: dict = {}
        for m, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(m)
        return cls(list(groups.values()), len(labels))

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    def cluster_of(self, m: int) -> int:
        return int(self.member_of[m])

    def to_lists(self) -> List[List[int]]:
        return [c.tolist() for c in self.clusters]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.num_faps == other.num_faps and self.to_lists() == other.to_lists()

    def __repr__(self) -> str:
        return f"Partition({self.to_lists()})"


@dataclass(frozen=True)
class EvalResult:
    """Total delay (s), total energy (J) and the blended objective."""

    delay: float
    energy: float
    objective: float


def new_placement(params: SystemParams) -> np.ndarray:
    """Empty placement matrix of the right shape and dtype."""
    return np.zeros((params.num_faps, params.num_contents), dtype=np.uint8)


def feasible(x: np.ndarray, params: SystemParams) -> bool:
    """True when every F-AP's cached bits fit its capacity."""
    counts = np.count_nonzero(x, axis=1)
    return bool(np.all(counts * params.content_size <= params.capacity))


def cluster_has(x: np.ndarray, partition: Partition, k: int, f: int) -> int:
    """1 when any member of cluster k caches content f, else 0."""
    members = partition.clusters[k]
    return int(np.any(x[members, f]))


def _best_holder(
    rates: LinkRateTable, x: np.ndarray, m: int, f: int,
    members: Optional[np.ndarray] = None,
) -> int:
    """Holder of f with the best fronthaul rate toward m (lowest index on
    ties); -1 when nobody holds it.  ``members`` restricts candidates."""
    cand = np.nonzero(x[:, f])[0] if members is None else members[x[members, f] > 0]
    best, best_rate = -1, -np.inf
    for n in cand:
        n = int(n)
        if n == m:
            continue
        r = rates.coop[m, n]
        if r > best_rate:
            best, best_rate = n, r
    return best


def delay_components(
    scenario: Scenario,
    rates: LinkRateTable,
    x: np.ndarray,
    partition: Partition,
    u: int,
    f: int,
) -> Tuple[float, float, float]:
    """The three mutually exclusive delay terms for one request.

    Returns (local_cluster, other_cluster, cloud); exactly one is
    nonzero for any placement.  Indicator arithmetic is kept literal:
    the local term carries x_k, the other two carry (1 - x_k) times the
    complementary product over all clusters.
    """
    params = scenario.params
    size = params.content_size
    m = int(scenario.local_fap[u])
    k = partition.cluster_of(m)
    r_mu = rates.access[m, u]

    x_local = cluster_has(x, partition, k, f)
    prod_none = 1
    for kk in range(partition.num_clusters):
        prod_none *= 1 - cluster_has(x, partition, kk, f)

    t_local = x_local * size / r_mu
    if params.intra_cluster_hop == "charged" and x_local and not x[m, f]:
        neighbor = _best_holder(rates, x, m, f, members=partition.clusters[k])
        t_local += size / rates.coop[m, neighbor]

    ind_other = (1 - x_local) * (1 - prod_none)
    if ind_other:
        holder = _best_holder(rates, x, m, f)
        t_other = ind_other * size * (1.0 / rates.coop[m, holder] + 1.0 / r_mu)
    else:
        t_other = 0.0

    t_cloud = (1 - x_local) * prod_none * size * (
        1.0 / params.cloud_rate + 1.0 / r_mu
    )
    return float(t_local), float(t_other), float(t_cloud)


def energy_components(
    scenario: Scenario,
    rates: LinkRateTable,
    x: np.ndarray,
    partition: Partition,
    u: int,
    f: int,
) -> Tuple[float, float, float]:
    """Energy analog of :func:`delay_components`."""
    params = scenario.params
    size = params.content_size
    powers = params.fap_powers()
    m = int(scenario.local_fap[u])
    k = partition.cluster_of(m)
    r_mu = rates.access[m, u]
    p_m = powers[m]

    x_local = cluster_has(x, partition, k, f)
    prod_none = 1
    for kk in range(partition.num_clusters):
        prod_none *= 1 - cluster_has(x, partition, kk, f)

    e_local = x_local * p_m * size / r_mu
    if params.intra_cluster_hop == "charged" and x_local and not x[m, f]:
        neighbor = _best_holder(rates, x, m, f, members=partition.clusters[k])
        e_local += p_m * size / rates.coop[m, neighbor]

    ind_other = (1 - x_local) * (1 - prod_none)
    if ind_other:
        holder = _best_holder(rates, x, m, f)
        e_other = ind_other * p_m * size * (
            1.0 / rates.coop[m, holder] + 1.0 / r_mu
        )
    else:
        e_other = 0.0

    e_cloud = (1 - x_local) * prod_none * size * (
        params.cloud_power / params.cloud_rate + p_m / r_mu
    )
    return float(e_local), float(e_other), float(e_cloud)


def request_delay(scenario, rates, x, partition, u: int, f: int) -> float:
    """Delay for user u requesting content f under placement x."""
    return sum(delay_components(scenario, rates, x, partition, u, f))


def request_energy(scenario, rates, x, partition, u: int, f: int) -> float:
    """Transmission energy for user u requesting content f."""
    return sum(energy_components(scenario, rates, x, partition, u, f))


def caching_energy(x: np.ndarray, params: SystemParams) -> float:
    """Energy spent holding the cached bits of placement x."""
    return params.cache_coeff * params.content_size * float(np.count_nonzero(x))


class PlacementEvaluator:
    """Demand-weighted expected delay/energy/objective for placements.

    The access-link transfer appears in every service regime, so its
    demand-weighted total is a placement-independent constant.  What
    remains varies only with (local F-AP, content), so per-user demand
    is aggregated once into a (M, F) mass and each evaluation reduces to
    a surcharge-table lookup.  This matches the per-request sum exactly
    up to float roundoff.
    """

    def __init__(
        self,
        scenario: Scenario,
        rates: LinkRateTable,
        partition: Partition,
        backend: Optional[str] = None,
    ):
        params = scenario.params
        self.scenario = scenario
        self.rates = rates
        self.partition = partition
        self.backend: Backend = (
            backend if isinstance(backend, Backend) else get_backend(backend)
        )
        self.mass = local_demand_mass(scenario)
        powers = params.fap_powers()
        size = params.content_size

        local = scenario.local_fap
        users = np.arange(params.num_users)
        access = rates.access[local, users]
        self.const_delay = float(np.sum(size / access))
        self.const_energy = float(np.sum(powers[local] * size / access))
        self._tx_power = powers
        self._charged = params.intra_cluster_hop == "charged"

    def evaluate(self, x: np.ndarray) -> EvalResult:
        params = self.scenario.params
        x = np.ascontiguousarray(x, dtype=np.uint8)
        extra_t, extra_e = self.backend.placement_extras(
            x,
            self.partition.member_of,
            self.partition.num_clusters,
            self.rates.coop,
            self._tx_power,
            params.content_size,
            params.cloud_rate,
            params.cloud_power,
            self._charged,
        )
        delay = self.const_delay + float(np.sum(self.mass * extra_t))
        energy = (
            caching_energy(x, params)
            + self.const_energy
            + float(np.sum(self.mass * extra_e))
        )
        mu = params.weight
        objective = mu * delay + (1.0 - mu) * energy
        return EvalResult(delay=delay, energy=energy, objective=objective)


def evaluate(
    scenario: Scenario,
    rates: LinkRateTable,
    x: np.ndarray,
    partition: Partition,
    backend: Optional[str] = None,
) -> EvalResult:
    """One-off evaluation; build a :class:`PlacementEvaluator` for loops."""
    return PlacementEvaluator(scenario, rates, partition, backend).evaluate(x)
