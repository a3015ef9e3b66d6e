"""Per-lender UCB learning state.

Each lender keeps, per borrower, a match count and an empirical mean in
which the initial utility acts as one pseudo-observation:
``mean = (u_l(b) + sum of observed rewards) / (1 + count)``.
The optimistic index is ``mean + sqrt(3 ln t / (2 count))``, infinite
while the pair is unvisited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MarketInstance

DEFAULT_HORIZON = 10_000


@dataclass
class BanditState:
    prior: np.ndarray        # (N, K) initial lender utilities
    reward_sum: np.ndarray   # (N, K)
    match_count: np.ndarray  # (N, K) int64
    step: int
    sentinel: float          # finite stand-in for the unvisited index

    @property
    def empirical_mean(self) -> np.ndarray:
        return (self.prior + self.reward_sum) / (1.0 + self.match_count)


@dataclass(frozen=True)
class RewardModel:
    family: str = "gaussian"   # "gaussian" | "deterministic"
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in ("gaussian", "deterministic"):
            raise ValueError(f"unknown reward family {self.family!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.family == "deterministic" and self.sigma != 0:
            raise ValueError("deterministic rewards require sigma = 0")


def sentinel_value(horizon: int) -> float:
    """Finite constant dominating every reachable index up to ``horizon``.

    Means live in [0, 1] and the exploration bonus peaks at one visit,
    so 2 + sqrt(3 ln T / 2) sits strictly above all finite indices.
    """
    return 2.0 + math.sqrt(1.5 * math.log(max(horizon, 2)))


def init_state(instance: MarketInstance,
               horizon: int = DEFAULT_HORIZON) -> BanditState:
    n, k = instance.num_lenders, instance.num_borrowers
    return BanditState(prior=instance.lender_utility.copy(),
                       reward_sum=np.zeros((n, k)),
                       match_count=np.zeros((n, k), dtype=np.int64),
                       step=0,
                       sentinel=sentinel_value(horizon))


def sample_reward(model: RewardModel, mean: float, rng) -> float:
    if model.family == "deterministic":
        return float(mean)
    return float(mean + model.sigma * rng.standard_normal())


def update_on_match(state: BanditState, lender: int, borrower: int,
                    reward: float) -> BanditState:
    """Record one observed reward for (lender, borrower); in place."""
    n, k = state.prior.shape
    if not (0 <= lender < n and 0 <= borrower < k):
        raise IndexError(f"pair ({lender}, {borrower}) outside ({n}, {k})")
    state.reward_sum[lender, borrower] += reward
    state.match_count[lender, borrower] += 1
    return state


def ucb_index(state: BanditState, lender: int, borrower: int) -> float:
    t = state.step
    count = state.match_count[lender, borrower]
    if count == 0:
        return state.sentinel
    mean = ((state.prior[lender, borrower]
             + state.reward_sum[lender, borrower]) / (1.0 + count))
    return float(mean + math.sqrt(1.5 * math.log(t) / count))


def _strictify_rows(mat: np.ndarray) -> np.ndarray:
    """Break exact within-row ties by column index, preserving the order
    of all distinct values."""
    out = mat.copy()
    cols = mat.shape[1]
    for i in range(out.shape[0]):
        row = out[i]
        uniq = np.unique(row)
        if uniq.size == row.size:
            continue
        gaps = np.diff(uniq)
        gap = float(gaps.min()) if gaps.size else 1.0
        eps = gap / (2.0 * cols)
        for v in uniq:
            idx = np.flatnonzero(row == v)
            if idx.size > 1:
                # earlier column index ranks higher within the tie
                row[idx] -= eps * np.arange(idx.size)
    return out


def current_utilities(state: BanditState) -> np.ndarray:
    """Optimistic index matrix shaped like the lender utilities.

    Unvisited pairs carry the dominating sentinel; exact ties are broken
    by (lender, borrower) index so every row is strictly ordered, which
    the matching solver requires of a utility override.
    """
    t = state.step
    count = state.match_count
    mean = state.empirical_mean
    with np.errstate(divide="ignore", invalid="ignore"):
        bonus = np.sqrt(1.5 * math.log(t) / count) if t >= 1 else \
            np.full_like(mean, np.inf)
    cu = np.where(count > 0, mean + bonus, state.sentinel)
    return _strictify_rows(cu)
