"""Numerical kernels with a numba fast path and a pure-numpy fallback.

The three hot spots of a simulation run live here: the per-placement
delay/energy surcharge table, the binary firefly move, and the capacity
repair sweep.  Each kernel exists twice, once as a numba ``@njit``
function and once in vectorized numpy, and both versions are written so
that their float operations happen in the same order.  A full run
therefore produces bit-identical results on either backend.

Randomness inside the kernels is counter-based: every draw is a pure
function of a 64-bit key and a flat element index, using the splitmix64
finisher.  That keeps draws bound to (iteration, firefly, element)
regardless of evaluation order or backend.

Set ``FOGCACHE_DISABLE_NUMBA=1`` in the environment before import to
skip numba entirely and run on the numpy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "HAS_NUMBA",
    "Backend",
    "get_backend",
    "mix64",
    "derive_key",
    "uniform_at",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

_GOLDEN_U64 = np.uint64(_GOLDEN)
_MIX1_U64 = np.uint64(_MIX1)
_MIX2_U64 = np.uint64(_MIX2)


def _numba_disabled() -> bool:
    return os.environ.get("FOGCACHE_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


try:
    if _numba_disabled():
        raise ImportError("numba disabled via FOGCACHE_DISABLE_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# Counter-based randomness.


def mix64(z: int) -> int:
    """splitmix64 finisher on a 64-bit integer (pure python)."""
    z &= _MASK64
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


def derive_key(seed: int, *parts: int) -> int:
    """Fold a seed and a tuple of stream coordinates into one 64-bit key."""
    h = mix64(seed & _MASK64)
    for p in parts:
        h = mix64(((h ^ (p & _MASK64)) + _GOLDEN) & _MASK64)
    return h


def _mix64_arr(z: np.ndarray) -> np.ndarray:
    # uint64 arrays wrap silently, matching the masked python arithmetic
    z = (z ^ (z >> np.uint64(30))) * _MIX1_U64
    z = (z ^ (z >> np.uint64(27))) * _MIX2_U64
    return z ^ (z >> np.uint64(31))


def uniform_at(key: int, idx: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) draws for the given flat element indices.

    The draw at index ``e`` depends only on ``(key, e)``, so any subset
    of elements can be evaluated in any order with identical results.
    """
    ctr = np.uint64(key) + (idx.astype(np.uint64) + np.uint64(1)) * _GOLDEN_U64
    return (_mix64_arr(ctr) >> np.uint64(11)).astype(np.float64) * _INV53


# ---------------------------------------------------------------------------
# numpy backend.


def _hamming_np(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(a != b))


def _move_np(
    xj: np.ndarray,
    xi: np.ndarray,
    beta: float,
    lam: float,
    key: int,
    per_element: bool,
) -> None:
    """Threshold move of flat binary row xj toward xi, in place.

    Element rule: new bit is 1 iff
    xj + beta*(xi - xj) + lam*(u - 1/2) - 1/2 >= 0.
    For lam <= 1 an element with xj == xi can never flip, so only the
    differing positions need draws.
    """
    if lam <= 1.0:
        idx = np.nonzero(xj != xi)[0]
    else:
        idx = np.arange(xj.size, dtype=np.int64)
    if idx.size == 0:
        return
    if per_element:
        u = uniform_at(key, idx)
    else:
        u = uniform_at(key, np.zeros(1, dtype=np.int64))[0]
    a = xj[idx].astype(np.float64)
    b = xi[idx].astype(np.float64)
    arg = a + beta * (b - a)
    arg = arg + lam * (u - 0.5)
    arg = arg - 0.5
    xj[idx] = (arg >= 0.0).astype(np.uint8)


def _repair_np(x: np.ndarray, prio: np.ndarray, slots: int, fill: bool) -> None:
    """Enforce the per-row slot budget in place.

    prio[m] lists content ids from most to least locally popular.  Rows
    over budget keep their first ``slots`` cached contents in that
    order; when ``fill`` is set, rows under budget take the most
    popular uncached contents until full.
    """
    cached = np.take_along_axis(x, prio, axis=1).astype(bool)
    rank = np.cumsum(cached, axis=1, dtype=np.int64)
    keep = cached & (rank <= slots)
    if fill:
        need = slots - keep.sum(axis=1)
        holes = ~cached
        hole_rank = np.cumsum(holes, axis=1, dtype=np.int64)
        keep |= holes & (hole_rank <= need[:, None])
    np.put_along_axis(x, prio, keep.astype(np.uint8), axis=1)


def _placement_extras_np(
    x: np.ndarray,
    member_of: np.ndarray,
    n_clusters: int,
    coop: np.ndarray,
    tx_power: np.ndarray,
    size_bits: float,
    cloud_rate: float,
    cloud_power: float,
    charged_intra: bool,
):
    """Per (F-AP, content) delay and energy surcharge over the access hop.

    A request lands in exactly one regime: cached inside the local
    cluster (no surcharge, or one intra-cluster hop when that hop is
    charged), cached somewhere else (one fronthaul hop from the best
    reachable holder), or nowhere (cloud fetch).
    """
    n_faps, n_contents = x.shape
    xb = x.astype(bool)
    cluster_has = np.zeros((n_clusters, n_contents), dtype=bool)
    for k in range(n_clusters):
        rows = xb[member_of == k]
        if rows.shape[0]:
            cluster_has[k] = rows.any(axis=0)
    local_has = cluster_has[member_of]
    anywhere = cluster_has.any(axis=0)

    extra_t = np.zeros((n_faps, n_contents))
    extra_e = np.zeros((n_faps, n_contents))

    # remote regime: best transfer rate among all holders (holders are
    # outside the local cluster here, so self never competes)
    masked = np.where(xb[None, :, :], coop[:, :, None], -np.inf)
    best = masked.max(axis=1)
    remote = ~local_has & anywhere[None, :]
    if remote.any():
        rows, cols = np.nonzero(remote)
        rate = best[rows, cols]
        extra_t[rows, cols] = size_bits / rate
        extra_e[rows, cols] = (tx_power[rows] * size_bits) / rate

    cloud_cols = ~anywhere
    if cloud_cols.any():
        extra_t[:, cloud_cols] = size_bits / cloud_rate
        extra_e[:, cloud_cols] = (cloud_power * size_bits) / cloud_rate

    if charged_intra:
        # local-cluster hit served by a neighbor rather than the local
        # F-AP itself costs one fronthaul hop from the best holder
        same = member_of[:, None] == member_of[None, :]
        np.fill_diagonal(same, False)
        cand = np.where(
            xb[None, :, :] & same[:, :, None], coop[:, :, None], -np.inf
        )
        best_in = cand.max(axis=1)
        hop = local_has & ~xb
        if hop.any():
            rows, cols = np.nonzero(hop)
            rate = best_in[rows, cols]
            extra_t[rows, cols] = size_bits / rate
            extra_e[rows, cols] = (tx_power[rows] * size_bits) / rate

    return extra_t, extra_e


# ---------------------------------------------------------------------------
# numba backend.

if HAS_NUMBA:

    @_njit(cache=True, inline="always")
    def _uniform_nb(key: np.uint64, e: np.int64) -> np.float64:
        z = key + (np.uint64(e) + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        return np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)

    @_njit(cache=True)
    def _hamming_nb(a: np.ndarray, b: np.ndarray) -> int:
        n = 0
        for e in range(a.size):
            if a[e] != b[e]:
                n += 1
        return n

    @_njit(cache=True)
    def _move_nb(xj, xi, beta, lam, key, per_element):
        key_u = np.uint64(key)
        u_shared = _uniform_nb(key_u, np.int64(0))
        sparse = lam <= 1.0
        for e in range(xj.size):
            if sparse and xj[e] == xi[e]:
                continue
            if per_element:
                u = _uniform_nb(key_u, np.int64(e))
            else:
                u = u_shared
            a = np.float64(xj[e])
            b = np.float64(xi[e])
            arg = a + beta * (b - a)
            arg = arg + lam * (u - 0.5)
            arg = arg - 0.5
            xj[e] = np.uint8(1) if arg >= 0.0 else np.uint8(0)

    @_njit(cache=True)
    def _repair_nb(x, prio, slots, fill):
        n_faps, n_contents = x.shape
        for m in range(n_faps):
            kept = 0
            for r in range(n_contents):
                f = prio[m, r]
                if x[m, f]:
                    if kept < slots:
                        kept += 1
                    else:
                        x[m, f] = 0
            if fill:
                for r in range(n_contents):
                    if kept >= slots:
                        break
                    f = prio[m, r]
                    if not x[m, f]:
                        x[m, f] = 1
                        kept += 1

    @_njit(cache=True)
    def _placement_extras_nb(
        x,
        member_of,
        n_clusters,
        coop,
        tx_power,
        size_bits,
        cloud_rate,
        cloud_power,
        charged_intra,
    ):
        n_faps, n_contents = x.shape
        cluster_has = np.zeros((n_clusters, n_contents), dtype=np.uint8)
        for m in range(n_faps):
            k = member_of[m]
            for f in range(n_contents):
                if x[m, f]:
                    cluster_has[k, f] = 1
        anywhere = np.zeros(n_contents, dtype=np.uint8)
        for k in range(n_clusters):
            for f in range(n_contents):
                if cluster_has[k, f]:
                    anywhere[f] = 1

        extra_t = np.zeros((n_faps, n_contents))
        extra_e = np.zeros((n_faps, n_contents))
        cloud_t = size_bits / cloud_rate
        cloud_e = (cloud_power * size_bits) / cloud_rate
        for m in range(n_faps):
            k = member_of[m]
            for f in range(n_contents):
                if cluster_has[k, f]:
                    if charged_intra and not x[m, f]:
                        best = -np.inf
                        for n in range(n_faps):
                            if n != m and member_of[n] == k and x[n, f]:
                                if coop[m, n] > best:
                                    best = coop[m, n]
                        extra_t[m, f] = size_bits / best
                        extra_e[m, f] = (tx_power[m] * size_bits) / best
                elif anywhere[f]:
                    best = -np.inf
                    for n in range(n_faps):
                        if x[n, f] and coop[m, n] > best:
                            best = coop[m, n]
                    extra_t[m, f] = size_bits / best
                    extra_e[m, f] = (tx_power[m] * size_bits) / best
                else:
                    extra_t[m, f] = cloud_t
                    extra_e[m, f] = cloud_e
        return extra_t, extra_e


# ---------------------------------------------------------------------------
# Backend selection.


@dataclass(frozen=True)
class Backend:
    """Bundle of kernel implementations sharing one calling convention."""

    name: str
    hamming: Callable[[np.ndarray, np.ndarray], int]
    move: Callable[..., None]
    repair: Callable[..., None]
    placement_extras: Callable[..., tuple]


_NUMPY_BACKEND = Backend(
    name="numpy",
    hamming=_hamming_np,
    move=_move_np,
    repair=_repair_np,
    placement_extras=_placement_extras_np,
)

if HAS_NUMBA:
    _NUMBA_BACKEND: Optional[Backend] = Backend(
        name="numba",
        hamming=_hamming_nb,
        move=_move_nb,
        repair=_repair_nb,
        placement_extras=_placement_extras_nb,
    )
else:
    _NUMBA_BACKEND = None


def get_backend(name: Optional[str] = None) -> Backend:
    """Resolve a backend by name.

    ``None`` or ``"auto"`` picks numba when available and falls back to
    numpy otherwise.  Asking for ``"numba"`` when it is unavailable (not
    installed, or disabled through FOGCACHE_DISABLE_NUMBA) is an error.
    """
    if name is None or name == "auto":
        return _NUMBA_BACKEND if _NUMBA_BACKEND is not None else _NUMPY_BACKEND
    if name == "numpy":
        return _NUMPY_BACKEND
    if name == "numba":
        if _NUMBA_BACKEND is None:
            raise RuntimeError("numba backend requested but not available")
        return _NUMBA_BACKEND
    raise ValueError(f"unknown backend {name!r}")
