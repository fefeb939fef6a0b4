"""User-to-BS association policies.

All argmax tie-breaks resolve to the lowest index (BS or tier), so every
policy is deterministic and reproducible across runs and worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .radio import LinkTable, Mode, sinr_matrix
from .scenario import ScenarioConfig


class PolicyTag(str, Enum):
    MAX_POWER = "max_power"
    MAX_SINR = "max_sinr"
    BIASED = "biased"
    LOAD_AWARE = "load_aware"
    ORACLE = "oracle"


class TooLarge(ValueError):
    """Brute-force search space exceeds the configured bound."""


@dataclass(frozen=True)
class Association:
    serving: np.ndarray  # (n_users,) global BS index
    policy_tag: PolicyTag


def associate_max_power(link: LinkTable) -> Association:
    """Serve each user from its strongest received-power BS, any band."""
    if link.n_bs == 0:
        raise ValueError("no base stations to associate with")
    return Association(serving=np.argmax(link.rx_mw, axis=1), policy_tag=PolicyTag.MAX_POWER)


def tier_best(link: LinkTable, n_tiers: int):
    """Per user and tier, the strongest BS and its received power.

    Returns (best_rx, best_bs) of shapes (n_users, n_tiers); tiers with no
    BSs get rx -inf and bs -1. Within a tier the lowest global BS index
    wins ties.
    """
    n_users = link.n_users
    best_rx = np.full((n_users, n_tiers), -np.inf)
    best_bs = np.full((n_users, n_tiers), -1, dtype=np.int64)
    for t in range(n_tiers):
        cols = np.flatnonzero(link.bs_tier_idx == t)
        if cols.size == 0:
            continue
        sub = link.rx_mw[:, cols]
        j = np.argmax(sub, axis=1)
        best_rx[:, t] = sub[np.arange(n_users), j]
        best_bs[:, t] = cols[j]
    return best_rx, best_bs


def biased_from_tier_best(best_rx: np.ndarray, best_bs: np.ndarray,
                          biases: np.ndarray) -> np.ndarray:
    """Chosen serving BS per user: argmax over tiers of bias * tier power."""
    scores = best_rx * biases[None, :]
    k_star = np.argmax(scores, axis=1)
    return best_bs[np.arange(best_rx.shape[0]), k_star]


def associate_biased(link: LinkTable, biases) -> Association:
    """Tier-level biased association.

    The chosen tier maximizes bias * (strongest in-tier received power);
    the serving BS is that strongest BS. ``biases`` are linear ratios
    aligned with the scenario's tier order.
    """
    biases = np.asarray(biases, dtype=float)
    if np.any(biases <= 0):
        raise ValueError("biases must be positive linear ratios")
    best_rx, best_bs = tier_best(link, biases.size)
    serving = biased_from_tier_best(best_rx, best_bs, biases)
    if np.any(serving < 0):
        raise ValueError("some user has no candidate BS in any tier")
    return Association(serving=serving, policy_tag=PolicyTag.BIASED)


def associate_max_sinr(link: LinkTable, scenario: ScenarioConfig) -> Association:
    """Serve each user from its highest full-mode SINR BS."""
    if link.n_bs == 0:
        raise ValueError("no base stations to associate with")
    s = sinr_matrix(link, scenario, Mode.FULL)
    return Association(serving=np.argmax(s, axis=1), policy_tag=PolicyTag.MAX_SINR)


_KLNK_CACHE: dict[int, np.ndarray] = {}


def _k_ln_k(n: int) -> np.ndarray:
    """Lookup table [0, n]: K * ln K with the K=0 limit set to 0."""
    if n not in _KLNK_CACHE:
        k = np.arange(n + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.where(k > 0, k * np.log(np.maximum(k, 1)), 0.0)
        _KLNK_CACHE[n] = table
    return _KLNK_CACHE[n]


def brute_force_log_utility(rates: np.ndarray, max_size: int = 10**7,
                            chunk: int = 1 << 18):
    """Exhaustively maximize sum_u ln(c[u, b(u)] / K_b(u)) over binary maps.

    ``rates`` is the (n_users, n_bs) full-resource rate matrix. Assignments
    are enumerated in lexicographic order (user 0 most significant) and the
    first maximum wins, so ties resolve to the lowest BS indices. Raises
    TooLarge when n_bs ** n_users exceeds ``max_size``.

    Returns (Association, objective in nats).
    """
    c = np.asarray(rates, dtype=float)
    n_users, n_bs = c.shape
    if n_bs == 0 or n_users == 0:
        raise ValueError("need at least one user and one BS")
    space = n_bs ** n_users
    if space > max_size:
        raise TooLarge(f"{n_bs}^{n_users} = {space} exceeds max_size={max_size}")

    with np.errstate(divide="ignore"):
        lnc = np.where(c > 0, np.log(np.maximum(c, 1e-300)), -np.inf)
    klnk = _k_ln_k(n_users)
    # mixed-radix digit weights, user 0 most significant
    weights = n_bs ** np.arange(n_users - 1, -1, -1, dtype=np.int64)

    best_score = -np.inf
    best_index = -1
    for start in range(0, space, chunk):
        idx = np.arange(start, min(start + chunk, space), dtype=np.int64)
        assign = (idx[:, None] // weights[None, :]) % n_bs
        score = lnc[np.arange(n_users)[None, :], assign].sum(axis=1)
        for b in range(n_bs):
            score = score - klnk[(assign == b).sum(axis=1)]
        j = int(np.argmax(score))
        if score[j] > best_score:
            best_score = float(score[j])
            best_index = int(idx[j])

    if not np.isfinite(best_score):
        raise ValueError("every assignment serves some user at zero rate")
    digits = (best_index // weights) % n_bs
    return Association(serving=digits.astype(np.int64), policy_tag=PolicyTag.ORACLE), best_score
