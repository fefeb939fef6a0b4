"""Received powers, per-band interference aggregates, and SINR.

Propagation is a bare power law with a near-field clamp: rx = tx * d^-alpha
with d in metres, floored at ``min_distance_m``. No shadowing or fast fading
in the baseline; ``build_link_table`` accepts an optional multiplicative
fading matrix for sensitivity studies.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .netgen import NetworkRealization, pairwise_torus_distance
from .scenario import ScenarioConfig


class Mode(Enum):
    FULL = "full"
    MACRO_BLANKED = "macro_blanked"


class InvalidMode(ValueError):
    """Blanked-mode SINR requested for a muted (macro) serving BS."""


@dataclass(frozen=True)
class PathlossModel:
    exponent: float
    min_distance_m: float


def received_power(tx_power_mw, distance_km, model: PathlossModel):
    """Power-law received power in mW; distance clamped at the near-field floor.

    Accepts scalars or arrays. rx = tx * max(d_m, min_distance)^-alpha.
    """
    d_m = np.maximum(np.asarray(distance_km, dtype=float) * 1e3, model.min_distance_m)
    result = np.asarray(tx_power_mw, dtype=float) * d_m ** (-model.exponent)
    return result if result.ndim else float(result)


@dataclass(frozen=True)
class LinkTable:
    """All pairwise received powers for one realization, plus band sums.

    ``rx_mw``            (n_users, n_bs) received power per link
    ``total_by_band``    (n_users, n_bands) sum over all BSs on the band
    ``macro_by_band``    (n_users, n_bands) sum over macro-tier BSs only
    ``bs_band_idx``      (n_bs,) column index into the band axis
    ``bs_tier_idx``      (n_bs,) index into scenario.tiers
    ``bs_is_macro``      (n_bs,) bool
    """

    rx_mw: np.ndarray
    total_by_band: np.ndarray
    macro_by_band: np.ndarray
    bs_band_idx: np.ndarray
    bs_tier_idx: np.ndarray
    bs_is_macro: np.ndarray

    @property
    def n_users(self) -> int:
        return self.rx_mw.shape[0]

    @property
    def n_bs(self) -> int:
        return self.rx_mw.shape[1]

    @property
    def n_bands(self) -> int:
        return self.total_by_band.shape[1]


def band_aggregates(rx_mw: np.ndarray, bs_band_idx: np.ndarray, bs_is_macro: np.ndarray,
                    n_bands: int, active: Optional[np.ndarray] = None):
    """Sum rx over (optionally a subset of) BSs, per band and per macro-band."""
    total = np.zeros((rx_mw.shape[0], n_bands))
    macro = np.zeros((rx_mw.shape[0], n_bands))
    for band in range(n_bands):
        cols = bs_band_idx == band
        if active is not None:
            cols = cols & active
        total[:, band] = rx_mw[:, cols].sum(axis=1)
        macro[:, band] = rx_mw[:, cols & bs_is_macro].sum(axis=1)
    return total, macro


def build_link_table(real: NetworkRealization, scenario: ScenarioConfig,
                     fading: Optional[np.ndarray] = None) -> LinkTable:
    """Pairwise powers via torus distance, then per-band interference sums.

    ``fading``, if given, is an (n_users, n_bs) multiplicative gain applied
    to every link before aggregation.
    """
    tier_index = {t.tier_id: k for k, t in enumerate(scenario.tiers)}
    bs_tier_idx = np.array([tier_index[tid] for tid in real.bs_tier_id], dtype=np.int64)
    tier_power = np.array([t.tx_power_mw for t in scenario.tiers])
    tier_band_idx = np.array([scenario.band_index(t.band_id) for t in scenario.tiers],
                             dtype=np.int64)
    tier_macro = np.array([t.is_macro for t in scenario.tiers], dtype=bool)

    model = PathlossModel(scenario.pathloss_exponent, scenario.min_distance_m)
    dist = pairwise_torus_distance(real.users_xy, real.bs_xy, real.region_side_km)
    rx = received_power(tier_power[bs_tier_idx][None, :], dist, model)
    rx = np.atleast_2d(rx)
    if real.n_users == 0 or real.n_bs == 0:
        rx = rx.reshape(real.n_users, real.n_bs)
    if fading is not None:
        rx = rx * fading

    bs_band_idx = tier_band_idx[bs_tier_idx]
    bs_is_macro = tier_macro[bs_tier_idx]
    total, macro = band_aggregates(rx, bs_band_idx, bs_is_macro, len(scenario.bands))
    return LinkTable(rx_mw=rx, total_by_band=total, macro_by_band=macro,
                     bs_band_idx=bs_band_idx, bs_tier_idx=bs_tier_idx,
                     bs_is_macro=bs_is_macro)


def noise_by_band(scenario: ScenarioConfig) -> np.ndarray:
    return np.array([b.noise_mw for b in scenario.bands])


def bandwidth_by_band(scenario: ScenarioConfig) -> np.ndarray:
    return np.array([b.bandwidth_hz for b in scenario.bands])


def sinr_matrix(link: LinkTable, scenario: ScenarioConfig, mode: Mode,
                total_by_band: Optional[np.ndarray] = None,
                macro_by_band: Optional[np.ndarray] = None) -> np.ndarray:
    """(n_users, n_bs) SINR; blanked-mode entries for macro BSs are NaN.

    Alternative aggregates may be passed to model load-dependent
    interference (only transmitting BSs counted); the serving BS's own
    power is still removed from its band total.
    """
    total = link.total_by_band if total_by_band is None else total_by_band
    macro = link.macro_by_band if macro_by_band is None else macro_by_band
    noise = noise_by_band(scenario)
    interf = total[:, link.bs_band_idx] - link.rx_mw
    if mode == Mode.MACRO_BLANKED:
        interf = interf - macro[:, link.bs_band_idx]
        # a muted macro contributed its own rx to the macro sum: restore it
        interf = interf + np.where(link.bs_is_macro[None, :], link.rx_mw, 0.0)
    denom = interf + noise[link.bs_band_idx][None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = link.rx_mw / denom
    if mode == Mode.MACRO_BLANKED:
        out[:, link.bs_is_macro] = np.nan
    return out


def sinr(link: LinkTable, user: int, bs: int, mode: Mode,
         scenario: ScenarioConfig) -> float:
    """SINR of one link as a linear ratio.

    FULL: everything co-band interferes. MACRO_BLANKED: macro-tier power is
    struck from the denominator; asking for a macro serving BS in that mode
    raises InvalidMode, since a muted BS cannot serve.
    """
    if mode == Mode.MACRO_BLANKED and link.bs_is_macro[bs]:
        raise InvalidMode(f"BS {bs} is macro-tier and muted in blanked subframes")
    band = link.bs_band_idx[bs]
    rx = link.rx_mw[user, bs]
    interf = link.total_by_band[user, band] - rx
    if mode == Mode.MACRO_BLANKED:
        interf -= link.macro_by_band[user, band]
    noise = scenario.bands[band].noise_mw
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(rx / (interf + noise))


def serving_sinr(link: LinkTable, serving: np.ndarray, scenario: ScenarioConfig,
                 mode: Mode, total_by_band: Optional[np.ndarray] = None,
                 macro_by_band: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-user SINR of its serving BS; blanked mode yields NaN on macro links."""
    users = np.arange(link.n_users)
    total = link.total_by_band if total_by_band is None else total_by_band
    macro = link.macro_by_band if macro_by_band is None else macro_by_band
    band = link.bs_band_idx[serving]
    rx = link.rx_mw[users, serving]
    interf = total[users, band] - rx
    if mode == Mode.MACRO_BLANKED:
        interf = interf - macro[users, band]
        is_macro_link = link.bs_is_macro[serving]
        interf = interf + np.where(is_macro_link, rx, 0.0)
    noise = noise_by_band(scenario)[band]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = rx / (interf + noise)
    if mode == Mode.MACRO_BLANKED:
        out = np.where(link.bs_is_macro[serving], np.nan, out)
    return out
