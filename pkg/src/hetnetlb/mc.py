"""Monte Carlo ensembles, bias/blanking sweeps, and density-trend studies.

Seeds are derived per realization index from the master seed, so ensembles
are reproducible for any worker count, and every grid point of a sweep sees
identical realizations (common random numbers). Because neither bias nor
eta affects geometry or the full-buffer interference field, a sweep builds
each realization's link table once and replays the cheap association and
rate steps per grid point; the numbers are exactly those of a separate
``run_ensemble`` per point.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Optional, Sequence

import numpy as np

from .assoc import (Association, PolicyTag, associate_biased, associate_max_power,
                    associate_max_sinr, biased_from_tier_best, tier_best)
from .loadopt import SolverParams, rate_matrix_from_links, round_association, solve_relaxed
from .netgen import generate_realization
from .radio import LinkTable, Mode, band_aggregates, build_link_table, serving_sinr
from .scenario import ScenarioConfig, Variant, db_to_linear
from .sched import compute_loads, range_expansion_flags, rate_kernel, spectral_efficiency, user_rates
from .stats import RateStats, mean_log, percentile, positive_part


DEFAULT_BIAS_GRID_DB: tuple = tuple(float(b) for b in range(0, 31))
DEFAULT_ETA_GRID: tuple = tuple(i / 10 for i in range(0, 10))

# production-size instances need a small price step: the exponential load
# response makes the dual stiff, and step0 ~ 1 rings for thousands of
# iterations while 0.05 settles to a 1e-3 gap within a few hundred
DEFAULT_ENSEMBLE_SOLVER = SolverParams(step0=0.05, max_iters=500, gap_tol=1e-3)


class Objective(str, Enum):
    PCT5 = "pct5"
    PCT50 = "pct50"
    MEAN_LOG = "mean_log"

    def evaluate(self, samples: np.ndarray) -> float:
        stats = RateStats(samples)
        if self is Objective.PCT5:
            return percentile(stats, 5.0)
        if self is Objective.PCT50:
            return percentile(stats, 50.0)
        positive, _ = positive_part(stats)  # zero rates excluded from the log mean
        return mean_log(positive)


class TrendMode(str, Enum):
    IN_BAND = "in_band"
    IN_BAND_BLANK = "in_band_blank"
    OUT_OF_BAND = "out_of_band"


def realization_seed(master_seed: int, index: int) -> int:
    """64-bit per-realization seed, a pure function of (master_seed, index)."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class EnsembleResult:
    """Pooled per-user samples across all realizations, in realization order."""

    rates: np.ndarray
    sinr_full: np.ndarray  # serving-link full-mode SINR (SIR when noise = 0)
    tier_id: np.ndarray
    range_expanded: np.ndarray

    def stats(self) -> RateStats:
        return RateStats(self.rates)


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            return pool.map(fn, items)
    return [fn(item) for item in items]


def _eval_policy_on_links(scenario: ScenarioConfig, link: LinkTable,
                          policy: PolicyTag, solver_params: SolverParams):
    if policy == PolicyTag.MAX_POWER:
        assoc = associate_max_power(link)
    elif policy == PolicyTag.MAX_SINR:
        assoc = associate_max_sinr(link, scenario)
    elif policy == PolicyTag.BIASED:
        biases = np.array([t.bias for t in scenario.tiers])
        assoc = associate_biased(link, biases)
    elif policy == PolicyTag.LOAD_AWARE:
        rates = rate_matrix_from_links(link, scenario)
        fractional, _ = solve_relaxed(rates, solver_params)
        assoc = round_association(fractional, rates)
    else:
        raise ValueError(f"unsupported ensemble policy: {policy}")

    loads = compute_loads(assoc, link)
    total = macro = None
    if not scenario.full_buffer_interference:
        # single-pass approximation: only BSs that won at least one user interfere
        active = loads.k_total > 0
        total, macro = band_aggregates(link.rx_mw, link.bs_band_idx, link.bs_is_macro,
                                       link.n_bands, active=active)
    rates_bps, tier_ids, re = user_rates(assoc, loads, link, scenario,
                                         total_by_band=total, macro_by_band=macro)
    sinr_full = serving_sinr(link, assoc.serving, scenario, Mode.FULL,
                             total_by_band=total, macro_by_band=macro)
    return rates_bps, sinr_full, tier_ids, re


def _realization_detail(index: int, scenario: ScenarioConfig, policy: PolicyTag,
                        master_seed: int, solver_params: SolverParams):
    seed = realization_seed(master_seed, index)
    real = generate_realization(scenario, seed)
    link = build_link_table(real, scenario)
    return _eval_policy_on_links(scenario, link, policy, solver_params)


def run_ensemble_detail(scenario: ScenarioConfig, policy: PolicyTag, realizations: int,
                        master_seed: int, workers: int = 1,
                        solver_params: Optional[SolverParams] = None) -> EnsembleResult:
    """Pool per-user samples over ``realizations`` independent draws."""
    if realizations < 1:
        raise ValueError("need at least one realization")
    params = solver_params or DEFAULT_ENSEMBLE_SOLVER
    fn = partial(_realization_detail, scenario=scenario, policy=policy,
                 master_seed=master_seed, solver_params=params)
    parts = _map(fn, list(range(realizations)), workers)
    return EnsembleResult(
        rates=np.concatenate([p[0] for p in parts]),
        sinr_full=np.concatenate([p[1] for p in parts]),
        tier_id=np.concatenate([p[2] for p in parts]),
        range_expanded=np.concatenate([p[3] for p in parts]),
    )


def run_ensemble(scenario: ScenarioConfig, policy: PolicyTag, realizations: int,
                 master_seed: int, workers: int = 1,
                 solver_params: Optional[SolverParams] = None) -> RateStats:
    """Pooled rate samples as RateStats; see run_ensemble_detail for raw arrays."""
    detail = run_ensemble_detail(scenario, policy, realizations, master_seed,
                                 workers, solver_params)
    return detail.stats()


@dataclass(frozen=True)
class SweepResult:
    """Objective values over a (bias, eta) grid and where the maximum sits.

    ``values[i, j]`` belongs to bias_grid_db[i] and eta_grid[j]. Argmax ties
    resolve to the lowest bias index first, then the lowest eta index.
    ``per_eta_best_bias_db[j]`` is Fig.-5-style: the best bias per eta.
    """

    objective: Objective
    variant: Variant
    bias_grid_db: tuple
    eta_grid: tuple
    values: np.ndarray
    best_bias_db: float
    best_eta: float
    samples_per_point: int

    @property
    def per_eta_best_bias_db(self) -> tuple:
        return tuple(self.bias_grid_db[i] for i in np.argmax(self.values, axis=0))

    @property
    def best_value(self) -> float:
        return float(np.max(self.values))


@dataclass(frozen=True)
class _SweepCache:
    """Everything bias/eta evaluation needs from one realization.

    Only the strongest BS per tier can ever serve under tier-level biasing,
    so per user we keep that candidate's identity, received power, and both
    SINR modes; the full link table is dropped after this is built.
    """

    best_rx: np.ndarray     # (n_users, n_tiers)
    best_bs: np.ndarray     # (n_users, n_tiers) global BS index, -1 if empty
    sinr_full: np.ndarray   # (n_users, n_tiers)
    sinr_blank: np.ndarray  # (n_users, n_tiers), NaN for macro tiers
    strongest_is_macro: np.ndarray  # (n_users,)
    n_bs: int


def _build_sweep_cache(index: int, scenario: ScenarioConfig, master_seed: int) -> _SweepCache:
    seed = realization_seed(master_seed, index)
    real = generate_realization(scenario, seed)
    link = build_link_table(real, scenario)
    n_tiers = len(scenario.tiers)
    best_rx, best_bs = tier_best(link, n_tiers)

    n_users = link.n_users
    sinr_full = np.full((n_users, n_tiers), np.nan)
    sinr_blank = np.full((n_users, n_tiers), np.nan)
    for t, tier in enumerate(scenario.tiers):
        if np.all(best_bs[:, t] < 0):
            continue
        sinr_full[:, t] = serving_sinr(link, best_bs[:, t], scenario, Mode.FULL)
        if not tier.is_macro:
            sinr_blank[:, t] = serving_sinr(link, best_bs[:, t], scenario,
                                            Mode.MACRO_BLANKED)
    strongest = np.argmax(link.rx_mw, axis=1)
    return _SweepCache(best_rx=best_rx, best_bs=best_bs, sinr_full=sinr_full,
                       sinr_blank=sinr_blank,
                       strongest_is_macro=link.bs_is_macro[strongest],
                       n_bs=link.n_bs)


def _cache_rates(cache: _SweepCache, scenario: ScenarioConfig, biases: np.ndarray,
                 eta: float, variant: Variant, se_full_all: np.ndarray,
                 se_blank_all: np.ndarray) -> np.ndarray:
    """Rates for one grid point from a cached realization."""
    n_users = cache.best_rx.shape[0]
    users = np.arange(n_users)
    scores = cache.best_rx * biases[None, :]
    k_star = np.argmax(scores, axis=1)
    serving = cache.best_bs[users, k_star]

    tier_is_macro = np.array([t.is_macro for t in scenario.tiers])
    serving_is_macro = tier_is_macro[k_star]
    re = (~serving_is_macro) & cache.strongest_is_macro
    k_total = np.bincount(serving, minlength=cache.n_bs)
    k_re = np.bincount(serving[re], minlength=cache.n_bs)
    k_nre = k_total - k_re

    tier_bw = np.array([scenario.band_by_id(t.band_id).bandwidth_hz for t in scenario.tiers])
    return rate_kernel(
        bw_hz=tier_bw[k_star],
        serving_is_macro=serving_is_macro,
        re=re,
        k_total=k_total[serving].astype(float),
        k_re=k_re[serving].astype(float),
        k_nre=k_nre[serving].astype(float),
        se_full=se_full_all[users, k_star],
        se_blank=se_blank_all[users, k_star],
        eta=eta,
        variant=variant,
    )


def _sweep_grid(scenario: ScenarioConfig, bias_grid_db: Sequence[float],
                eta_grid: Sequence[float], variant: Variant, objective: Objective,
                realizations: int, master_seed: int, workers: int) -> SweepResult:
    if len(bias_grid_db) == 0 or len(eta_grid) == 0:
        raise ValueError("grids must be non-empty")

    if scenario.full_buffer_interference:
        caches = _map(partial(_build_sweep_cache, scenario=scenario,
                              master_seed=master_seed),
                      list(range(realizations)), workers)
        with np.errstate(invalid="ignore"):
            se_full = [spectral_efficiency(c.sinr_full, scenario.amc_floor_db) for c in caches]
            se_blank = [spectral_efficiency(c.sinr_blank, scenario.amc_floor_db) for c in caches]
        tier_macro_mask = np.array([t.is_macro for t in scenario.tiers])
        values = np.empty((len(bias_grid_db), len(eta_grid)))
        n_samples = 0
        for i, bias_db in enumerate(bias_grid_db):
            biases = np.where(tier_macro_mask, 1.0, db_to_linear(bias_db))
            for j, eta in enumerate(eta_grid):
                pooled = np.concatenate([
                    _cache_rates(caches[r], scenario, biases, eta, variant,
                                 se_full[r], se_blank[r])
                    for r in range(realizations)
                ])
                n_samples = pooled.size
                values[i, j] = objective.evaluate(pooled)
    else:
        # load-dependent interference couples geometry to the association:
        # fall back to one full ensemble per grid point (same seeds)
        values = np.empty((len(bias_grid_db), len(eta_grid)))
        n_samples = 0
        for i, bias_db in enumerate(bias_grid_db):
            for j, eta in enumerate(eta_grid):
                point = scenario.with_small_cell_bias_db(bias_db).with_blanking(eta, variant)
                pooled = run_ensemble(point, PolicyTag.BIASED, realizations,
                                      master_seed, workers).samples
                n_samples = pooled.size
                values[i, j] = objective.evaluate(pooled)

    flat = int(np.argmax(values))
    bi, bj = np.unravel_index(flat, values.shape)
    return SweepResult(objective=objective, variant=variant,
                       bias_grid_db=tuple(float(b) for b in bias_grid_db),
                       eta_grid=tuple(float(e) for e in eta_grid),
                       values=values, best_bias_db=float(bias_grid_db[bi]),
                       best_eta=float(eta_grid[bj]), samples_per_point=n_samples)


def sweep_bias(scenario: ScenarioConfig, bias_grid_db: Sequence[float],
               objective: Objective, realizations: int, master_seed: int,
               workers: int = 1) -> SweepResult:
    """Objective vs small-cell bias with the scenario's own blanking setting."""
    return _sweep_grid(scenario, bias_grid_db, (scenario.blanking.eta,),
                       scenario.blanking.variant, objective, realizations,
                       master_seed, workers)


def sweep_blanking(scenario: ScenarioConfig, bias_grid_db: Sequence[float],
                   eta_grid: Sequence[float], variant: Variant, objective: Objective,
                   realizations: int, master_seed: int, workers: int = 1) -> SweepResult:
    """2-D sweep over (bias, eta) for a blanking variant."""
    if variant == Variant.OFF:
        raise ValueError("blanking sweep requires a blanking variant")
    return _sweep_grid(scenario, bias_grid_db, eta_grid, variant, objective,
                       realizations, master_seed, workers)


@dataclass(frozen=True)
class TrendPoint:
    ratio: float
    best_bias_db: float
    best_eta: Optional[float]
    objective_value: float


def density_trend(scenario: ScenarioConfig, ratio_grid: Sequence[float], mode: TrendMode,
                  objective: Objective, realizations: int, master_seed: int,
                  workers: int = 1,
                  bias_grid_db: Sequence[float] = DEFAULT_BIAS_GRID_DB,
                  eta_grid: Sequence[float] = DEFAULT_ETA_GRID) -> list[TrendPoint]:
    """Optimal bias (and eta, for the blanked mode) per small-to-macro ratio.

    The small-cell density is set to ratio * macro density; the scenario's
    band layout decides in-band vs out-of-band, the mode decides whether
    eta is swept too.
    """
    macro_density = next(t.density_per_km2 for t in scenario.tiers if t.is_macro)
    points = []
    for ratio in ratio_grid:
        if ratio <= 0:
            raise ValueError("density ratios must be positive")
        scaled = scenario.with_small_cell_density(ratio * macro_density)
        if mode == TrendMode.IN_BAND_BLANK:
            result = sweep_blanking(scaled, bias_grid_db, eta_grid,
                                    Variant.RE_ONLY_IN_BLANK, objective,
                                    realizations, master_seed, workers)
            best_eta: Optional[float] = result.best_eta
        else:
            result = sweep_bias(scaled, bias_grid_db, objective, realizations,
                                master_seed, workers)
            best_eta = None
        points.append(TrendPoint(ratio=float(ratio), best_bias_db=result.best_bias_db,
                                 best_eta=best_eta, objective_value=result.best_value))
    return points
