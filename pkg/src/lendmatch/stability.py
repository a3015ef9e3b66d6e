"""Blocking-pair analysis and the matching objective."""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import DimensionMismatch
from .model import MarketInstance


def blocking_pairs(instance: MarketInstance, assignment, lender_utility=None):
    """Minimal blocking-pair matrix w and its total count.

    For each pair (b, l) the stability left-hand side is
    ``c_b x_bl + c_b * sum over lenders b prefers to l of x_bl'
    + q_l * sum over borrowers l prefers to b of x_b'l``;
    w_bl = 0 iff it reaches c_b.  This is the unique minimal w
    consistent with the stability constraint for the given assignment.

    ``lender_utility`` optionally replaces the instance's lender
    utilities as the source of the lender-side preference order (the
    bandit loop matches on reported indices, so its blocking pairs are
    judged against those same reports).
    """
    x = np.asarray(assignment)
    k, n = instance.num_borrowers, instance.num_lenders
    if x.shape != (k, n):
        raise DimensionMismatch(f"assignment shape {x.shape} != ({k}, {n})")
    ul = (instance.lender_utility if lender_utility is None
          else np.asarray(lender_utility, dtype=np.float64))
    w = backend.blocking_matrix(instance.capacity, instance.budget,
                                instance.borrower_utility, ul, x)
    return w, int(w.sum())


def objective_value(instance: MarketInstance, assignment, blocking, weights,
                    utility_matrix) -> float:
    """lambda1 * sum U[l, b] x_bl - lambda2 * sum w_bl.

    ``utility_matrix`` is lender-major (N, K): the lender utilities for
    the learning objective, or the summed borrower+lender matrix for the
    hindsight baseline.
    """
    x = np.asarray(assignment, dtype=np.float64)
    w = np.asarray(blocking, dtype=np.float64)
    u = np.asarray(utility_matrix, dtype=np.float64)
    k, n = instance.num_borrowers, instance.num_lenders
    if x.shape != (k, n) or w.shape != (k, n) or u.shape != (n, k):
        raise DimensionMismatch(
            f"shapes x={x.shape} w={w.shape} u={u.shape} for K={k}, N={n}")
    return float(weights.lambda1 * np.sum(u * x.T)
                 - weights.lambda2 * np.sum(w))
