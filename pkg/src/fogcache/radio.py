"""Wireless link rates using a power-law pathloss Shannon model.

Two link families exist: access links from an F-AP to a user and
cooperative fronthaul links between F-APs.  Both use bandwidth times
log2(1 + SINR) with pathloss d^-alpha, distances clamped below by
``params.min_distance`` so co-located nodes keep a finite rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .scenario import Scenario

__all__ = [
    "LinkRateTable",
    "interference_at",
    "access_rate",
    "coop_rate",
    "build_rate_table",
]


@dataclass(frozen=True)
class LinkRateTable:
    """Precomputed link rates for one scenario.

    access[m, u] is the F-AP m to user u rate in bit/s; coop[m, n] the
    F-AP m to F-AP n rate, zero on the diagonal (no self link).
    """

    access: np.ndarray  # (M, U)
    coop: np.ndarray  # (M, M)

    def validate(self) -> None:
        if self.access.ndim != 2 or self.coop.ndim != 2:
            raise ValueError("rate tables must be 2-D")
        if self.coop.shape[0] != self.coop.shape[1]:
            raise ValueError("coop table must be square")
        if self.access.shape[0] != self.coop.shape[0]:
            raise ValueError("access and coop tables disagree on the F-AP count")
        if np.any(self.access <= 0):
            raise ValueError("access rates must be positive")
        if np.any(np.diagonal(self.coop) != 0):
            raise ValueError("coop diagonal must be zero")


def _clamped_distance(a: np.ndarray, b: np.ndarray, floor: float) -> float:
    d = float(np.hypot(a[0] - b[0], a[1] - b[1]))
    return max(d, floor)


def interference_at(
    scenario: Scenario,
    receiver_pos: np.ndarray,
    serving_fap: int,
    exclude: Iterable[int] = (),
) -> float:
    """Interference power (W) at a receiver, by the configured mode.

    ``none`` gives 0, ``constant`` the configured constant, and
    ``geometric`` sums the received power of every F-AP other than the
    serving one (plus any ids in ``exclude``, used for F-AP receivers
    that do not interfere with themselves).
    """
    params = scenario.params
    mode = params.interference_mode
    if mode == "none":
        return 0.0
    if mode == "constant":
        return params.interference_const
    powers = params.fap_powers()
    skip = {int(serving_fap)} | {int(e) for e in exclude}
    total = 0.0
    for n in range(params.num_faps):
        if n in skip:
            continue
        d = _clamped_distance(scenario.fap_pos[n], receiver_pos, params.min_distance)
        total += powers[n] * d ** (-params.pathloss_alpha)
    return total


def _shannon(bandwidth: float, power: float, dist: float,
             alpha: float, noise: float, interference: float) -> float:
    snr = power * dist ** (-alpha) / (noise + interference)
    return bandwidth * np.log2(1.0 + snr)


def access_rate(scenario: Scenario, m: int, u: int) -> float:
    """Downlink rate (bit/s) from F-AP m to user u."""
    params = scenario.params
    pos = scenario.user_pos[u]
    d = _clamped_distance(scenario.fap_pos[m], pos, params.min_distance)
    i = interference_at(scenario, pos, m)
    return float(
        _shannon(params.bw_access, params.fap_powers()[m], d,
                 params.pathloss_alpha, params.noise, i)
    )


def coop_rate(scenario: Scenario, m: int, n: int) -> float:
    """Fronthaul rate (bit/s) from F-AP m to F-AP n; m == n is an error."""
    if m == n:
        raise ValueError("no cooperative link from an F-AP to itself")
    params = scenario.params
    pos = scenario.fap_pos[n]
    d = _clamped_distance(scenario.fap_pos[m], pos, params.min_distance)
    # the receiving F-AP does not interfere with itself
    i = interference_at(scenario, pos, m, exclude=(n,))
    return float(
        _shannon(params.bw_coop, params.fap_powers()[m], d,
                 params.pathloss_alpha, params.noise, i)
    )


def build_rate_table(scenario: Scenario) -> LinkRateTable:
    """All link rates for a scenario in one vectorized pass."""
    params = scenario.params
    powers = params.fap_powers()
    alpha = params.pathloss_alpha
    floor = params.min_distance

    diff_au = scenario.fap_pos[:, None, :] - scenario.user_pos[None, :, :]
    d_au = np.maximum(np.sqrt(np.sum(diff_au * diff_au, axis=2)), floor)
    recv_au = powers[:, None] * d_au ** (-alpha)

    diff_ff = scenario.fap_pos[:, None, :] - scenario.fap_pos[None, :, :]
    d_ff = np.maximum(np.sqrt(np.sum(diff_ff * diff_ff, axis=2)), floor)
    recv_ff = powers[:, None] * d_ff ** (-alpha)

    mode = params.interference_mode
    if mode == "none":
        i_au = 0.0
        i_ff = 0.0
    elif mode == "constant":
        i_au = params.interference_const
        i_ff = params.interference_const
    else:
        # every non-serving F-AP interferes; for an F-AP receiver the
        # receiver itself is excluded as well.  Summing the masked
        # contributions avoids subtracting from a grand total, which
        # loses digits whenever the serving term dominates the sum.
        ids = np.arange(params.num_faps)
        not_serving = ids[:, None] != ids[None, :]  # [interferer, server]
        i_au = np.where(
            not_serving[:, :, None], recv_au[:, None, :], 0.0
        ).sum(axis=0)
        mask_ff = not_serving[:, :, None] & not_serving[:, None, :]
        i_ff = np.where(mask_ff, recv_ff[:, None, :], 0.0).sum(axis=0)

    access = params.bw_access * np.log2(1.0 + recv_au / (params.noise + i_au))
    coop = params.bw_coop * np.log2(1.0 + recv_ff / (params.noise + i_ff))
    np.fill_diagonal(coop, 0.0)
    table = LinkRateTable(access=access, coop=coop)
    table.validate()
    return table
