"""Social ties between F-APs: contact, similarity, loss, and the mutual
utility matrix that drives clustering.

Two F-APs are socially close when their local user groups meet often
(a distance-driven contact model) and want similar content (Pearson
correlation of local popularity).  Cooperation also carries a cost:
caching for a neighbor and shipping contents over the fronthaul.  The
relationship score nets the two, decays with F-AP distance, and is cut
off beyond a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .radio import LinkRateTable
from .scenario import Scenario, all_local_popularity

__all__ = [
    "SocialGraph",
    "contact_probability",
    "pair_contact",
    "popularity_similarity",
    "social_loss",
    "social_relationship",
    "build_social_graph",
    "cluster_preference",
]


@dataclass(frozen=True)
class SocialGraph:
    """Symmetric mutual-utility matrix plus the intermediate layers.

    ``mutual[m, n]`` is the benefit m and n grant each other when they
    share a cluster; the diagonal is zero.  The intermediate matrices
    are kept for inspection and export and may be absent on graphs
    built directly from a matrix.
    """

    mutual: np.ndarray  # (M, M), symmetric, zero diagonal
    contact: Optional[np.ndarray] = None  # expected pair contacts
    similarity: Optional[np.ndarray] = None  # popularity correlation
    gain: Optional[np.ndarray] = None  # contact * similarity
    loss: Optional[np.ndarray] = None  # cooperation cost, joules
    relation: Optional[np.ndarray] = None  # directed netted score

    @property
    def num_faps(self) -> int:
        return self.mutual.shape[0]

    @classmethod
    def from_mutual(cls, mutual: np.ndarray) -> "SocialGraph":
        mutual = np.asarray(mutual, dtype=float)
        if mutual.ndim != 2 or mutual.shape[0] != mutual.shape[1]:
            raise ValueError("mutual matrix must be square")
        if not np.allclose(mutual, mutual.T):
            raise ValueError("mutual matrix must be symmetric")
        if np.any(np.diagonal(mutual) != 0):
            raise ValueError("mutual matrix must have a zero diagonal")
        return cls(mutual=mutual)

    def validate(self) -> None:
        SocialGraph.from_mutual(self.mutual)


def contact_probability(distance: float, density: float) -> float:
    """Chance that two users within ``distance`` of each other meet.

    Grows from 0 with distance and saturates below 1.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if density < 0:
        raise ValueError("density must be non-negative")
    return 1.0 - math.exp(-density * math.pi * distance * distance)


def pair_contact(scenario: Scenario, m: int, n: int) -> float:
    """Expected number of contacts between the user groups of m and n.

    Sums the contact probability over every cross pair, so the value
    can exceed 1 for well-populated groups; either group empty gives 0.
    """
    users_m = scenario.users_of(m)
    users_n = scenario.users_of(n)
    if users_m.size == 0 or users_n.size == 0:
        return 0.0
    density = scenario.params.effective_user_density
    pos_m = scenario.user_pos[users_m]
    pos_n = scenario.user_pos[users_n]
    diff = pos_m[:, None, :] - pos_n[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    return float(np.sum(1.0 - np.exp(-density * math.pi * dist * dist)))


def popularity_similarity(scenario: Scenario, m: int, n: int) -> float:
    """Correlation between the local popularity profiles of m and n.

    Uses the Pearson coefficient (covariance over the product of
    standard deviations); a profile with no spread, including that of
    an F-AP with no users, yields 0.  Setting
    ``params.similarity_denominator = "var"`` divides by the product of
    variances instead, which leaves the sign but not the scale intact.
    """
    s_m = _popularity_row(scenario, m)
    s_n = _popularity_row(scenario, n)
    var_m = float(np.var(s_m))
    var_n = float(np.var(s_n))
    if var_m == 0.0 or var_n == 0.0:
        return 0.0
    cov = float(np.mean((s_m - s_m.mean()) * (s_n - s_n.mean())))
    if scenario.params.similarity_denominator == "var":
        return cov / (var_m * var_n)
    return cov / math.sqrt(var_m * var_n)


def _popularity_row(scenario: Scenario, m: int) -> np.ndarray:
    if not 0 <= m < scenario.params.num_faps:
        raise ValueError(f"F-AP index {m} out of range")
    users = scenario.users_of(m)
    if users.size == 0:
        return np.zeros(scenario.params.num_contents)
    total = scenario.demand[users].sum(axis=0)
    return total / total.sum()


def social_loss(scenario: Scenario, rates: LinkRateTable, m: int, n: int) -> float:
    """Cost (J) F-AP m expects from cooperating with F-AP n.

    Covers caching on behalf of m's users plus pushing every content
    once over the m-to-n fronthaul for each of them; an F-AP with no
    users loses nothing.
    """
    if m == n:
        raise ValueError("cooperation loss is defined between distinct F-APs")
    params = scenario.params
    users_m = scenario.users_of(m)
    if users_m.size == 0:
        return 0.0
    demand_sum = float(scenario.demand[users_m].sum())
    p_m = params.fap_powers()[m]
    fronthaul = params.num_contents * users_m.size * p_m / rates.coop[m, n]
    return params.content_size * (params.cache_coeff * demand_sum + fronthaul)


def social_relationship(
    scenario: Scenario,
    rates: LinkRateTable,
    m: int,
    n: int,
    delta: Optional[float] = None,
) -> float:
    """Directed relationship score of m toward n.

    Gain (contact times similarity) minus ``delta`` times the
    cooperation loss, damped by distance; zero beyond the cutoff.
    """
    if m == n:
        return 0.0
    params = scenario.params
    if delta is None:
        delta = params.social_delta
    d = float(
        np.hypot(
            scenario.fap_pos[m, 0] - scenario.fap_pos[n, 0],
            scenario.fap_pos[m, 1] - scenario.fap_pos[n, 1],
        )
    )
    if d > params.dist_threshold:
        return 0.0
    gain = pair_contact(scenario, m, n) * popularity_similarity(scenario, m, n)
    loss = social_loss(scenario, rates, m, n)
    return math.exp(-d / params.dist_threshold) * (gain - delta * loss)


def build_social_graph(
    scenario: Scenario,
    rates: LinkRateTable,
    delta: Optional[float] = None,
) -> SocialGraph:
    """Assemble the full social graph for a scenario.

    The mutual utility of a pair is the sum of the two directed
    relationship scores, so the matrix is symmetric by construction.
    """
    params = scenario.params
    if delta is None:
        delta = params.social_delta
    m_count = params.num_faps
    density = params.effective_user_density
    powers = params.fap_powers()

    # expected contacts between every pair of user groups
    diff = scenario.user_pos[:, None, :] - scenario.user_pos[None, :, :]
    dist_uu = np.sqrt(np.sum(diff * diff, axis=2))
    meet = 1.0 - np.exp(-density * math.pi * dist_uu * dist_uu)
    membership = np.zeros((m_count, params.num_users))
    membership[scenario.local_fap, np.arange(params.num_users)] = 1.0
    contact = membership @ meet @ membership.T

    # popularity correlation; degenerate rows contribute zero
    pop = all_local_popularity(scenario)
    centered = pop - pop.mean(axis=1, keepdims=True)
    cov = (centered @ centered.T) / params.num_contents
    var = np.diagonal(cov).copy()
    spread = np.sqrt(var) if params.similarity_denominator == "std" else var
    denom = spread[:, None] * spread[None, :]
    similarity = np.zeros((m_count, m_count))
    np.divide(cov, denom, out=similarity, where=denom > 0)

    gain = contact * similarity

    user_counts = np.bincount(scenario.local_fap, minlength=m_count).astype(float)
    demand_mass = np.bincount(
        scenario.local_fap, weights=scenario.demand.sum(axis=1), minlength=m_count
    )
    inv_coop = np.zeros_like(rates.coop)
    np.divide(1.0, rates.coop, out=inv_coop, where=rates.coop > 0)
    fronthaul = params.num_contents * user_counts[:, None] * powers[:, None] * inv_coop
    loss = params.content_size * (
        params.cache_coeff * demand_mass[:, None] + fronthaul
    )
    np.fill_diagonal(loss, 0.0)

    fap_diff = scenario.fap_pos[:, None, :] - scenario.fap_pos[None, :, :]
    dist_ff = np.sqrt(np.sum(fap_diff * fap_diff, axis=2))
    relation = np.where(
        dist_ff <= params.dist_threshold,
        np.exp(-dist_ff / params.dist_threshold) * (gain - delta * loss),
        0.0,
    )
    np.fill_diagonal(relation, 0.0)

    mutual = relation + relation.T
    np.fill_diagonal(mutual, 0.0)
    return SocialGraph(
        mutual=mutual,
        contact=contact,
        similarity=similarity,
        gain=gain,
        loss=loss,
        relation=relation,
    )


def cluster_preference(graph: SocialGraph, m: int, members: Iterable[int]) -> float:
    """Utility F-AP m derives from sitting in a cluster with ``members``.

    Sums mutual utility toward each member; m itself may appear in the
    iterable and contributes zero.  The empty cluster is worth 0.
    """
    idx = np.asarray(list(members), dtype=np.int64)
    if idx.size == 0:
        return 0.0
    return float(np.sum(graph.mutual[m, idx]))
