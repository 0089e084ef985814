"""Scenario generation: geometry, demand, and system parameters.

A scenario is a frozen random instance of the network: F-AP and user
positions on a square area, each user's nearest (local) F-AP, and a
per-user content request distribution built from a global Zipf ranking
with partially shuffled per-user rank orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "SystemParams",
    "Scenario",
    "zipf_distribution",
    "generate_scenario",
    "local_popularity",
    "all_local_popularity",
    "local_demand_mass",
    "capacity_slots",
]

_MASK64 = (1 << 64) - 1

_INTERFERENCE_MODES = ("none", "constant", "geometric")
_INTRA_HOP_MODES = ("free", "charged")
_SIMILARITY_DENOMS = ("std", "var")


@dataclass(frozen=True)
class SystemParams:
    """Physical and economic constants of the simulated network.

    All quantities are in SI base units: bits, seconds, watts, joules,
    meters, hertz.  Powers given in dBm or sizes in GB must be converted
    before construction (see :mod:`fogcache.config`).
    """

    num_faps: int = 15
    num_users: int = 150
    num_contents: int = 1000
    content_size: float = 4.0e9  # bits (500 MB)
    capacity: float = 4.0e11  # bits per F-AP cache (50 GB)
    bw_access: float = 1.0e7  # Hz, F-AP to user
    bw_coop: float = 1.0e7  # Hz, F-AP to F-AP
    noise: float = 1.0e-13  # W (-100 dBm)
    fap_power: Union[float, Sequence[float]] = 39.810717055349734  # W (46 dBm)
    cloud_power: float = 39.810717055349734  # W
    cloud_rate: float = 1.0e8  # bit/s on the cloud backhaul
    pathloss_alpha: float = 4.0
    cache_coeff: float = 6.25e-12  # J per cached bit
    weight: float = 0.01  # objective mix, 1 = pure delay
    zipf_eta: float = 0.5
    side_length: float = 1000.0  # m
    user_density: Optional[float] = None  # users per m^2; default U / side^2
    social_delta: float = 1.0  # loss weight in the relationship score
    dist_threshold: float = 500.0  # m, relationship cutoff
    interference_mode: str = "constant"
    interference_const: float = 0.0  # W, used by the constant mode
    pref_shuffle: float = 0.3  # fraction of ranks permuted per user
    intra_cluster_hop: str = "free"
    similarity_denominator: str = "std"
    min_distance: float = 1.0  # m, pathloss clamp

    def __post_init__(self):
        if self.num_faps < 1 or self.num_users < 1 or self.num_contents < 1:
            raise ValueError("num_faps, num_users and num_contents must be >= 1")
        for name in ("content_size", "bw_access", "bw_coop", "noise",
                     "cloud_power", "cloud_rate", "side_length",
                     "dist_threshold", "min_distance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.capacity < 0:
            raise ValueError("capacity must be non-negative")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")
        if self.pathloss_alpha <= 0:
            raise ValueError("pathloss_alpha must be positive")
        if self.cache_coeff < 0:
            raise ValueError("cache_coeff must be non-negative")
        if self.zipf_eta < 0:
            raise ValueError("zipf_eta must be non-negative")
        if self.social_delta < 0:
            raise ValueError("social_delta must be non-negative")
        if not 0.0 <= self.pref_shuffle <= 1.0:
            raise ValueError("pref_shuffle must lie in [0, 1]")
        if self.interference_mode not in _INTERFERENCE_MODES:
            raise ValueError(f"interference_mode must be one of {_INTERFERENCE_MODES}")
        if self.interference_const < 0:
            raise ValueError("interference_const must be non-negative")
        if self.intra_cluster_hop not in _INTRA_HOP_MODES:
            raise ValueError(f"intra_cluster_hop must be one of {_INTRA_HOP_MODES}")
        if self.similarity_denominator not in _SIMILARITY_DENOMS:
            raise ValueError(
                f"similarity_denominator must be one of {_SIMILARITY_DENOMS}"
            )
        if self.user_density is not None and self.user_density <= 0:
            raise ValueError("user_density must be positive when given")
        powers = self.fap_powers()
        if powers.shape != (self.num_faps,) or np.any(powers <= 0):
            raise ValueError("fap_power must be a positive scalar or one value per F-AP")

    def fap_powers(self) -> np.ndarray:
        """Transmit power per F-AP as an array of shape (num_faps,)."""
        if np.isscalar(self.fap_power):
            return np.full(self.num_faps, float(self.fap_power))
        return np.asarray(self.fap_power, dtype=float)

    @property
    def effective_user_density(self) -> float:
        if self.user_density is not None:
            return self.user_density
        return self.num_users / (self.side_length * self.side_length)

    @property
    def is_degenerate(self) -> bool:
        """True when the cache cannot hold even a single content."""
        return self.capacity < self.content_size


def capacity_slots(params: SystemParams) -> int:
    """Whole contents that fit in one cache, at most the library size."""
    return min(int(params.capacity // params.content_size), params.num_contents)


@dataclass(eq=False)
class Scenario:
    """One sampled network instance."""

    params: SystemParams
    fap_pos: np.ndarray  # (M, 2) meters
    user_pos: np.ndarray  # (U, 2) meters
    local_fap: np.ndarray  # (U,) index of each user's nearest F-AP
    demand: np.ndarray  # (U, F) request probabilities, rows sum to 1
    seed: int = 0
    _users_by_fap: Optional[list] = field(default=None, repr=False)

    def validate(self) -> None:
        p = self.params
        if self.fap_pos.shape != (p.num_faps, 2):
            raise ValueError("fap_pos shape mismatch")
        if self.user_pos.shape != (p.num_users, 2):
            raise ValueError("user_pos shape mismatch")
        if self.local_fap.shape != (p.num_users,):
            raise ValueError("local_fap shape mismatch")
        if self.demand.shape != (p.num_users, p.num_contents):
            raise ValueError("demand shape mismatch")
        if np.any(self.local_fap < 0) or np.any(self.local_fap >= p.num_faps):
            raise ValueError("local_fap holds an out-of-range F-AP index")
        if np.any(self.demand < 0):
            raise ValueError("demand must be non-negative")
        if not np.allclose(self.demand.sum(axis=1), 1.0, rtol=0, atol=1e-9):
            raise ValueError("demand rows must each sum to 1")

    def users_of(self, m: int) -> np.ndarray:
        """Indices of users whose local F-AP is m."""
        if not 0 <= m < self.params.num_faps:
            raise ValueError(f"F-AP index {m} out of range")
        if self._users_by_fap is None:
            groups = [[] for _ in range(self.params.num_faps)]
            for u, fap in enumerate(self.local_fap):
                groups[int(fap)].append(u)
            object.__setattr__(
                self,
                "_users_by_fap",
                [np.asarray(g, dtype=np.int64) for g in groups],
            )
        return self._users_by_fap[m]


def zipf_distribution(eta: float, num_contents: int) -> np.ndarray:
    """Zipf probability over content ranks 1..F with exponent eta."""
    if num_contents < 1:
        raise ValueError("num_contents must be >= 1")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    ranks = np.arange(1, num_contents + 1, dtype=float)
    weights = ranks ** (-eta)
    return weights / weights.sum()


def _rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed & _MASK64, stream])


def generate_scenario(params: SystemParams, seed: int) -> Scenario:
    """Sample geometry and demand for one deterministic instance.

    The same (params, seed) pair always yields the same scenario,
    independent of global RNG state.
    """
    rng = _rng_for(seed, 0x5CE4)
    side = params.side_length
    m, u, f = params.num_faps, params.num_users, params.num_contents

    fap_pos = rng.uniform(0.0, side, size=(m, 2))
    user_pos = rng.uniform(0.0, side, size=(u, 2))

    # nearest F-AP; argmin takes the lowest index on ties
    diff = user_pos[:, None, :] - fap_pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    local_fap = np.argmin(dist, axis=1).astype(np.int64)

    base = zipf_distribution(params.zipf_eta, f)
    k_shuffle = int(params.pref_shuffle * f)
    demand = np.empty((u, f))
    for i in range(u):
        ranking = np.arange(f)
        if k_shuffle >= 2:
            pos = rng.choice(f, size=k_shuffle, replace=False)
            ranking[pos] = ranking[pos][rng.permutation(k_shuffle)]
        # content at rank position r receives the r-th Zipf mass
        demand[i, ranking] = base
    scenario = Scenario(
        params=params,
        fap_pos=fap_pos,
        user_pos=user_pos,
        local_fap=local_fap,
        demand=demand,
        seed=seed,
    )
    scenario.validate()
    return scenario


def local_demand_mass(scenario: Scenario) -> np.ndarray:
    """Unnormalized per-F-AP demand: w[m, f] = sum of p_{u,f} over local users."""
    p = scenario.params
    mass = np.zeros((p.num_faps, p.num_contents))
    np.add.at(mass, scenario.local_fap, scenario.demand)
    return mass


def local_popularity(scenario: Scenario, m: int) -> np.ndarray:
    """Normalized content popularity among the users local to F-AP m.

    An F-AP with no local users gets the all-zero vector.
    """
    if not 0 <= m < scenario.params.num_faps:
        raise ValueError(f"F-AP index {m} out of range")
    users = scenario.users_of(m)
    if users.size == 0:
        return np.zeros(scenario.params.num_contents)
    total = scenario.demand[users].sum(axis=0)
    return total / total.sum()


def all_local_popularity(scenario: Scenario) -> np.ndarray:
    """Stacked local popularity, shape (M, F); zero rows for empty F-APs."""
    mass = local_demand_mass(scenario)
    sums = mass.sum(axis=1, keepdims=True)
    out = np.zeros_like(mass)
    np.divide(mass, sums, out=out, where=sums > 0)
    return out
