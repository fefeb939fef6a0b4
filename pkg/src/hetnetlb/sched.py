"""Round-robin rate model with optional macro blanking and AMC floor.

Every user of a BS gets an equal 1/K time share of whichever subframe pool
it is scheduled in. Macros transmit only in the (1-eta) normal fraction.
Small cells either keep range-expanded users exclusively in the blanked
fraction (``re_only_in_blank``) or serve everyone in both fractions
(``all_subframes``). eta = 0 degenerates to plain round robin for every
variant: with no blanked subframes there is no partition to respect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assoc import Association
from .radio import LinkTable, Mode, serving_sinr
from .scenario import ScenarioConfig, Variant, db_to_linear


@dataclass(frozen=True)
class LoadState:
    """Per-BS user counts, split by range-expanded status."""

    k_total: np.ndarray
    k_re: np.ndarray
    k_nre: np.ndarray


@dataclass(frozen=True)
class RateSample:
    user: int
    rate_bps: float
    tier_id: int
    range_expanded: bool


def range_expansion_flags(association: Association, link: LinkTable) -> np.ndarray:
    """True where the serving BS is non-macro but max received power is macro."""
    strongest = np.argmax(link.rx_mw, axis=1)
    return (~link.bs_is_macro[association.serving]) & link.bs_is_macro[strongest]


def compute_loads(association: Association, link: LinkTable) -> LoadState:
    """Count users per BS; the user itself is included in its share 1/K."""
    serving = association.serving
    re = range_expansion_flags(association, link)
    k_total = np.bincount(serving, minlength=link.n_bs)
    k_re = np.bincount(serving[re], minlength=link.n_bs)
    return LoadState(k_total=k_total, k_re=k_re, k_nre=k_total - k_re)


def spectral_efficiency(sinr, amc_floor_db=None):
    """log2(1 + SINR) in bit/s/Hz; zero below the AMC decode floor."""
    sinr = np.asarray(sinr, dtype=float)
    se = np.log2(1.0 + sinr)
    if amc_floor_db is not None:
        se = np.where(sinr < db_to_linear(amc_floor_db), 0.0, se)
    return se


def rate_kernel(bw_hz: np.ndarray, serving_is_macro: np.ndarray, re: np.ndarray,
                k_total: np.ndarray, k_re: np.ndarray, k_nre: np.ndarray,
                se_full: np.ndarray, se_blank: np.ndarray,
                eta: float, variant: Variant) -> np.ndarray:
    """Vector rate formula shared by the ensemble and sweep paths.

    All inputs are per-user arrays already gathered for the serving BS;
    ``se_blank`` may hold NaN on macro links (never read there).
    """
    if variant == Variant.OFF or eta == 0.0:
        return bw_hz / k_total * se_full

    rate = np.empty(bw_hz.shape)
    macro = serving_is_macro
    rate[macro] = (1.0 - eta) * bw_hz[macro] / k_total[macro] * se_full[macro]
    small = ~macro
    if variant == Variant.ALL_SUBFRAMES:
        mixed = (1.0 - eta) * se_full[small] + eta * se_blank[small]
        rate[small] = bw_hz[small] / k_total[small] * mixed
    else:  # RE users live in the blanked fraction, the rest in normal frames
        re_small = small & re
        nre_small = small & ~re
        rate[re_small] = eta * bw_hz[re_small] / k_re[re_small] * se_blank[re_small]
        rate[nre_small] = (1.0 - eta) * bw_hz[nre_small] / k_nre[nre_small] * se_full[nre_small]
    return rate


def user_rates(association: Association, loads: LoadState, link: LinkTable,
               scenario: ScenarioConfig, total_by_band=None, macro_by_band=None):
    """Per-user long-term rates in bit/s for the whole association.

    Returns (rates, tier_ids, range_expanded). Optional aggregate overrides
    support the load-dependent interference mode.
    """
    serving = association.serving
    re = range_expansion_flags(association, link)
    bw = np.array([b.bandwidth_hz for b in scenario.bands])[link.bs_band_idx[serving]]
    s_full = serving_sinr(link, serving, scenario, Mode.FULL,
                          total_by_band=total_by_band, macro_by_band=macro_by_band)
    s_blank = serving_sinr(link, serving, scenario, Mode.MACRO_BLANKED,
                           total_by_band=total_by_band, macro_by_band=macro_by_band)
    se_full = spectral_efficiency(s_full, scenario.amc_floor_db)
    with np.errstate(invalid="ignore"):
        se_blank = spectral_efficiency(s_blank, scenario.amc_floor_db)

    rates = rate_kernel(
        bw_hz=bw,
        serving_is_macro=link.bs_is_macro[serving],
        re=re,
        k_total=loads.k_total[serving].astype(float),
        k_re=loads.k_re[serving].astype(float),
        k_nre=loads.k_nre[serving].astype(float),
        se_full=se_full,
        se_blank=se_blank,
        eta=scenario.blanking.eta,
        variant=scenario.blanking.variant,
    )
    tier_ids = np.array([t.tier_id for t in scenario.tiers])[link.bs_tier_idx[serving]]
    return rates, tier_ids, re


def user_rate(user: int, association: Association, loads: LoadState,
              link: LinkTable, scenario: ScenarioConfig) -> RateSample:
    """Single-user view of ``user_rates``."""
    rates, tier_ids, re = user_rates(association, loads, link, scenario)
    return RateSample(user=user, rate_bps=float(rates[user]),
                      tier_id=int(tier_ids[user]), range_expanded=bool(re[user]))
