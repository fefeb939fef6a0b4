"""Poisson point process sampling of BS and user positions on a square torus.

Seeding is counter-based: every random draw comes from a generator keyed by
(seed, redraw attempt, stream id), so realizations are pure functions of
(scenario, seed) and independent of evaluation order. Stream 0 carries the
users, stream k+1 carries tier k; a scenario that drops or rescales one tier
therefore reuses identical positions for every other tier and for the users.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioConfig


class DegenerateScenario(RuntimeError):
    """Raised when repeated redraws cannot produce a servable network."""


_MAX_REDRAWS = 100
_USER_STREAM = 0


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled deployment: BS positions per tier plus user positions.

    ``bs_xy`` is (n_bs, 2) in km, ``bs_tier_id`` the per-BS tier id,
    ``users_xy`` (n_users, 2) in km. Arrays are never mutated after creation.
    """

    region_side_km: float
    bs_xy: np.ndarray
    bs_tier_id: np.ndarray
    users_xy: np.ndarray
    seed: int

    @property
    def n_bs(self) -> int:
        return self.bs_xy.shape[0]

    @property
    def n_users(self) -> int:
        return self.users_xy.shape[0]


def _sample_uniform_points(rng: np.random.Generator, count: int, side: float) -> np.ndarray:
    return rng.uniform(0.0, side, size=(count, 2))


def _draw(scenario: ScenarioConfig, seed: int, attempt: int) -> NetworkRealization:
    side = scenario.region_side_km
    area = scenario.area_km2

    xs, tids = [], []
    for k, tier in enumerate(scenario.tiers):
        rng = np.random.default_rng([seed, attempt, k + 1])
        count = int(rng.poisson(tier.density_per_km2 * area))
        xs.append(_sample_uniform_points(rng, count, side))
        tids.append(np.full(count, tier.tier_id, dtype=np.int64))

    rng_users = np.random.default_rng([seed, attempt, _USER_STREAM])
    n_users = int(rng_users.poisson(scenario.user_density_per_km2 * area))
    users = _sample_uniform_points(rng_users, n_users, side)

    return NetworkRealization(
        region_side_km=side,
        bs_xy=np.concatenate(xs) if xs else np.zeros((0, 2)),
        bs_tier_id=np.concatenate(tids) if tids else np.zeros(0, dtype=np.int64),
        users_xy=users,
        seed=seed,
    )


def _is_servable(scenario: ScenarioConfig, real: NetworkRealization) -> bool:
    """Every active band must hold at least one BS whenever users exist."""
    if real.n_users == 0:
        return True
    if real.n_bs == 0:
        return False
    active_bands = {t.band_id for t in scenario.tiers if t.density_per_km2 > 0}
    tier_band = {t.tier_id: t.band_id for t in scenario.tiers}
    drawn_bands = {tier_band[tid] for tid in np.unique(real.bs_tier_id)}
    return active_bands.issubset(drawn_bands)


def generate_realization(scenario: ScenarioConfig, seed: int) -> NetworkRealization:
    """Sample one network realization; deterministic in (scenario, seed).

    Per tier the BS count is Poisson(density * area) with i.i.d. uniform
    positions, likewise for users. Draws that leave an active band empty
    while users exist are retried on an incremented substream, at most
    100 times, after which DegenerateScenario is raised.
    """
    for attempt in range(_MAX_REDRAWS):
        real = _draw(scenario, seed, attempt)
        if _is_servable(scenario, real):
            return real
    raise DegenerateScenario(
        f"no servable realization after {_MAX_REDRAWS} redraws (seed={seed}); "
        "densities are too low for the region"
    )


def torus_distance(p, q, region_side: float):
    """Euclidean distance in km with wrap-around on both axes.

    Accepts scalars-as-pairs or arrays broadcastable to (..., 2); returns a
    scalar or (...) array. Always <= region_side * sqrt(2) / 2.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    delta = np.abs(p - q)
    delta = np.minimum(delta, region_side - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def pairwise_torus_distance(a: np.ndarray, b: np.ndarray, region_side: float) -> np.ndarray:
    """(n, 2) x (m, 2) -> (n, m) torus distance matrix in km."""
    delta = np.abs(a[:, None, :] - b[None, :, :])
    delta = np.minimum(delta, region_side - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def write_realization_csv(real: NetworkRealization, path) -> None:
    """Dump positions as rows kind(bs|user), tier_id (-1 for users), x_km, y_km."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "tier_id", "x_km", "y_km"])
        for (x, y), tid in zip(real.bs_xy, real.bs_tier_id):
            writer.writerow(["bs", int(tid), f"{x:.6g}", f"{y:.6g}"])
        for x, y in real.users_xy:
            writer.writerow(["user", -1, f"{x:.6g}", f"{y:.6g}"])
