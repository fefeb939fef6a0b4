"""Relaxed load-aware association by dual decomposition.

The relaxed problem maximizes

    sum_{u,b} x_ub * ln c_ub  -  sum_b K_b * ln K_b,   K_b = sum_u x_ub

over row-stochastic x >= 0, the standard reshaping of sum-log of
load-shared rates. Dualizing the load-coupling constraint splits it into a
per-user argmax and a closed-form per-BS load response K = exp(mu - 1),
coordinated by a diminishing-step subgradient update on the prices mu. Weak
duality makes the best dual value a certificate: it upper-bounds every
binary association's log-utility.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assoc import Association, PolicyTag
from .radio import LinkTable, Mode, sinr_matrix
from .scenario import ScenarioConfig


class NoFeasibleUser(ValueError):
    """Some user has zero rate on every BS."""


class UndefinedUtility(ValueError):
    """A served user has zero rate, so ln(c/K) diverges."""


@dataclass(frozen=True)
class RateMatrix:
    """Per-(user, BS) full-resource Shannon rate in bit/s; 0 = unreachable."""

    c: np.ndarray

    @property
    def n_users(self) -> int:
        return self.c.shape[0]

    @property
    def n_bs(self) -> int:
        return self.c.shape[1]


def rate_matrix_from_links(link: LinkTable, scenario: ScenarioConfig) -> RateMatrix:
    """c_ub = band bandwidth * log2(1 + full-mode SINR), fully loaded."""
    bw = np.array([b.bandwidth_hz for b in scenario.bands])[link.bs_band_idx]
    s = sinr_matrix(link, scenario, Mode.FULL)
    return RateMatrix(c=bw[None, :] * np.log2(1.0 + s))


@dataclass(frozen=True)
class FractionalAssociation:
    """Row-stochastic user-to-BS weights from the relaxed problem."""

    x: np.ndarray

    def __post_init__(self):
        if self.x.size:
            row_sums = self.x.sum(axis=1)
            if np.any(self.x < -1e-12) or np.any(np.abs(row_sums - 1.0) > 1e-9):
                raise ValueError("rows must be nonnegative and sum to 1")


@dataclass
class DualState:
    mu: np.ndarray
    iterations: int
    best_dual: float
    best_primal: float
    trace: list = field(default_factory=list)  # (iteration, dual, primal, gap)

    @property
    def relative_gap(self) -> float:
        return _relative_gap(self.best_dual, self.best_primal)


@dataclass(frozen=True)
class SolverParams:
    step0: float = 1.0
    max_iters: int = 2000
    gap_tol: float = 1e-3

    def __post_init__(self):
        if self.step0 <= 0 or self.max_iters < 1 or self.gap_tol <= 0:
            raise ValueError("step0 > 0, max_iters >= 1, gap_tol > 0 required")


def load_response(mu):
    """Per-BS maximizer of mu*K - K*ln(K): K = exp(mu - 1)."""
    return np.exp(np.asarray(mu, dtype=float) - 1.0)


def _relative_gap(best_dual: float, best_primal: float) -> float:
    return (best_dual - best_primal) / max(1.0, abs(best_dual))


def _k_ln_k(k: np.ndarray) -> np.ndarray:
    return np.where(k > 0, k * np.log(np.maximum(k, 1e-300)), 0.0)


def solve_relaxed(rates: RateMatrix, params: SolverParams = SolverParams(),
                  record_trace: bool = False):
    """Run the dual subgradient loop; return (FractionalAssociation, DualState).

    Per iteration: each user puts full weight on argmax_b (ln c_ub - mu_b)
    (ties to the lowest index); prices move against the mismatch between the
    closed-form load response and the realized loads with step step0/sqrt(t).
    The integral user step doubles as a feasible binary association whose
    log-utility is tracked as best_primal; the dual value is tracked as
    best_dual. Stops at relative gap <= gap_tol or max_iters. The returned
    fractional solution is the average of the last 10% of user steps.
    """
    c = rates.c
    n_users, n_bs = c.shape
    if n_users == 0:
        return (FractionalAssociation(x=np.zeros((0, n_bs))),
                DualState(mu=np.ones(n_bs), iterations=0, best_dual=0.0, best_primal=0.0))

    with np.errstate(divide="ignore"):
        lnc = np.where(c > 0, np.log(np.maximum(c, 1e-300)), -np.inf)
    dead_users = ~np.isfinite(lnc).any(axis=1)
    if np.any(dead_users):
        raise NoFeasibleUser(f"users with all-zero rates: {np.flatnonzero(dead_users)[:10]}")

    # start prices at the uniform-load stationary point mu = 1 + ln(U/B);
    # project onto a box containing every useful price so the exponential
    # load response cannot blow up the subgradient after an overshoot
    mu_lo = 1.0 + np.log(1e-3)
    mu_hi = 1.0 + np.log(float(n_users))
    mu = np.full(n_bs, np.clip(1.0 + np.log(max(n_users / n_bs, 1e-12)), mu_lo, mu_hi))
    best_dual = np.inf
    best_primal = -np.inf
    tail: list[np.ndarray] = []
    tail_span = max(1, -(-params.max_iters // 10))  # ceil
    trace: list = []
    users = np.arange(n_users)

    iterations = 0
    for t in range(1, params.max_iters + 1):
        scores = lnc - mu[None, :]
        b_star = np.argmax(scores, axis=1)
        user_max = scores[users, b_star]
        k_loads = np.bincount(b_star, minlength=n_bs).astype(float)

        dual = float(user_max.sum() + load_response(mu).sum())
        primal = float((user_max + mu[b_star]).sum() - _k_ln_k(k_loads).sum())
        best_dual = min(best_dual, dual)
        best_primal = max(best_primal, primal)

        tail.append(b_star)
        if len(tail) > tail_span:
            tail.pop(0)

        iterations = t
        gap = _relative_gap(best_dual, best_primal)
        if record_trace:
            trace.append((t, dual, primal, gap))
        if gap <= params.gap_tol:
            break

        mu = np.clip(mu - (params.step0 / np.sqrt(t)) * (load_response(mu) - k_loads),
                     mu_lo, mu_hi)

    window = tail[-max(1, -(-iterations // 10)):]
    x = np.zeros((n_users, n_bs))
    for b_star in window:
        x[users, b_star] += 1.0
    x /= len(window)

    state = DualState(mu=mu, iterations=iterations, best_dual=best_dual,
                      best_primal=best_primal, trace=trace)
    return FractionalAssociation(x=x), state


def round_association(fractional: FractionalAssociation, rates: RateMatrix) -> Association:
    """Assign each user to its largest fractional weight, lowest index on ties."""
    serving = np.argmax(fractional.x, axis=1)
    return Association(serving=serving, policy_tag=PolicyTag.LOAD_AWARE)


def log_utility(association: Association, rates: RateMatrix) -> float:
    """sum_u ln(c_u,serving / K_serving) in nats, loads from the map itself."""
    serving = association.serving
    c_served = rates.c[np.arange(rates.n_users), serving]
    if np.any(c_served <= 0):
        raise UndefinedUtility("a served user has zero rate")
    k = np.bincount(serving, minlength=rates.n_bs).astype(float)
    return float(np.log(c_served).sum() - _k_ln_k(k).sum())


def write_trace_csv(state: DualState, path) -> None:
    """Convergence trace: iteration, dual, primal, gap."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "dual", "primal", "gap"])
        for row in state.trace:
            writer.writerow([row[0], f"{row[1]:.6g}", f"{row[2]:.6g}", f"{row[3]:.6g}"])
