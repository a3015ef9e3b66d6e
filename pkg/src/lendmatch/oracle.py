"""Brute-force ground truth for desk-size instances.

Every candidate assignment is a function from lenders to
{borrowers, unmatched}, walked as a base-(K+1) counter so memory stays
O(N) per candidate.  Used to validate the branch-and-bound solver and
the stability logic; never meant to scale.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded
from .model import MarketInstance
from .solver import Matching, ObjectiveWeights, _make_matching, lex_less
from .stability import blocking_pairs, objective_value

DEFAULT_BUDGET = 2_000_000
_TIE_TOL = 1e-9


def _assignments(k, n):
    """Yield lender->borrower maps (-1 = unmatched) in counter order."""
    digits = np.full(n, -1, dtype=np.int64)
    while True:
        yield digits
        i = 0
        while i < n:
            digits[i] += 1
            if digits[i] < k:
                break
            digits[i] = -1
            i += 1
        if i == n:
            return


def _require_budget(k, n, budget):
    if budget < 1:
        raise ValueError("enumeration budget must be positive")
    if (k + 1) ** n > budget:
        raise BudgetExceeded(
            f"(K+1)^N = {(k + 1) ** n} exceeds budget {budget}")


def enumerate_optimal(instance: MarketInstance, weights: ObjectiveWeights,
                      utility_matrix_selector: str = "lender_only",
                      budget: int = DEFAULT_BUDGET) -> Matching:
    """Exhaustively maximise the objective over all covering assignments.

    Tie-breaking matches the solver: among equal objectives (within
    1e-9) the row-major lexicographically smallest assignment wins.
    """
    k, n = instance.num_borrowers, instance.num_lenders
    _require_budget(k, n, budget)
    if utility_matrix_selector == "lender_only":
        U = instance.lender_utility
    elif utility_matrix_selector == "combined":
        U = instance.lender_utility + instance.borrower_utility.T
    else:
        raise ValueError(
            f"unknown utility selector {utility_matrix_selector!r}")

    q, c_b = instance.budget, instance.capacity
    best_x = None
    best_obj = -np.inf
    for a in _assignments(k, n):
        covered = np.zeros(k)
        for l in range(n):
            if a[l] >= 0:
                covered[a[l]] += q[l]
        if np.any(covered < c_b):
            continue
        x = np.zeros((k, n), dtype=np.int64)
        matched = a >= 0
        x[a[matched], np.flatnonzero(matched)] = 1
        w, _ = blocking_pairs(instance, x)
        obj = objective_value(instance, x, w, weights, U)
        if (obj > best_obj + _TIE_TOL
                or (obj > best_obj - _TIE_TOL
                    and (best_x is None or lex_less(x, best_x)))):
            best_obj = obj
            best_x = x
    if best_x is None:
        zero = np.zeros((k, n), dtype=np.int64)
        return _make_matching(instance, zero, weights, U, "infeasible",
                              certificate=tuple(range(k)))
    return _make_matching(instance, best_x, weights, U, "optimal")


def count_feasible(instance: MarketInstance,
                   budget: int = DEFAULT_BUDGET) -> int:
    """Number of assignments satisfying both hard constraints."""
    k, n = instance.num_borrowers, instance.num_lenders
    _require_budget(k, n, budget)
    q, c_b = instance.budget, instance.capacity
    count = 0
    for a in _assignments(k, n):
        covered = np.zeros(k)
        for l in range(n):
            if a[l] >= 0:
                covered[a[l]] += q[l]
        if np.all(covered >= c_b):
            count += 1
    return count
