"""Market domain types, random instance generation and structural validation.

The market has K borrowers requesting amounts ``capacity`` and N lenders
with investable amounts ``budget``.  Each side scores the other with
utilities in [0, 1]; within a single agent's row all values are distinct
so preference orders are strict.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AttemptCapExceeded, TiedUtilities


@dataclass(frozen=True)
class MarketInstance:
    """A complete borrower/lender market.

    ``lender_utility`` has one row per lender (utility over borrowers);
    ``borrower_utility`` one row per borrower (utility over lenders).
    """

    capacity: np.ndarray        # (K,) requested amounts c_b
    budget: np.ndarray          # (N,) investable amounts q_l
    lender_utility: np.ndarray  # (N, K)
    borrower_utility: np.ndarray  # (K, N)

    @property
    def num_borrowers(self) -> int:
        return self.capacity.shape[0]

    @property
    def num_lenders(self) -> int:
        return self.budget.shape[0]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for arr in (self.capacity, self.budget, self.lender_utility,
                    self.borrower_utility):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class PreferenceLists:
    """Strict preference orders derived from the utility matrices.

    ``lender_prefs[l]`` lists borrower indices in descending u_l(b) order;
    ``borrower_prefs[b]`` lists lender indices in descending u_b(l) order.
    """

    lender_prefs: tuple
    borrower_prefs: tuple


@dataclass
class GenerationConfig:
    num_borrowers: int
    num_lenders: int
    capacity_range: tuple = (5.0, 40.0)
    budget_range: tuple = (1.0, 10.0)
    utility_range: tuple = (0.0, 1.0)
    integer_amounts: bool = False
    max_attempts: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if self.num_borrowers < 1 or self.num_lenders < 1:
            raise ValueError("need at least one borrower and one lender")
        for name in ("capacity_range", "budget_range", "utility_range"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"{name} is empty: ({lo}, {hi})")
        if self.capacity_range[0] <= 0 or self.budget_range[0] <= 0:
            raise ValueError("capacities and budgets must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def _sample_amounts(rng, lo, hi, size, integer):
    if integer:
        return rng.integers(int(lo), int(hi) + 1, size=size).astype(np.float64)
    return rng.uniform(lo, hi, size=size)


def _sample_strict_rows(rng, rows, cols, lo, hi):
    """Sample a utility matrix, re-drawing entries until each row is tie-free."""
    mat = rng.uniform(lo, hi, size=(rows, cols))
    for i in range(rows):
        # ties are measure-zero for doubles but the invariant must hold
        # for any range, including degenerate ones
        guard = 0
        while len(np.unique(mat[i])) < cols:
            vals, counts = np.unique(mat[i], return_counts=True)
            for v in vals[counts > 1]:
                dup_idx = np.flatnonzero(mat[i] == v)[1:]
                mat[i, dup_idx] = rng.uniform(lo, hi, size=dup_idx.size)
            guard += 1
            if guard > 1000:
                raise TiedUtilities(
                    f"cannot break ties in row {i}; range too narrow")
    return mat


def generate_instance(config: GenerationConfig) -> MarketInstance:
    """Draw a random market satisfying all instance invariants.

    Capacity/budget vectors violating the aggregate feasibility condition
    sum(c) <= sum(q) are rejected and re-drawn up to ``max_attempts``.
    """
    rng = np.random.default_rng(config.seed)
    k, n = config.num_borrowers, config.num_lenders
    if not k < n:
        warnings.warn(
            "market regime expects far more lenders than borrowers "
            f"(got K={k}, N={n})", stacklevel=2)

    capacity = budget = None
    for _ in range(config.max_attempts):
        c = _sample_amounts(rng, *config.capacity_range, k,
                            config.integer_amounts)
        q = _sample_amounts(rng, *config.budget_range, n,
                            config.integer_amounts)
        if c.sum() <= q.sum():
            capacity, budget = c, q
            break
    if capacity is None:
        raise AttemptCapExceeded(
            f"no aggregate-feasible (c, q) draw in {config.max_attempts} "
            "attempts; ranges are incompatible")

    lo, hi = config.utility_range
    lender_utility = _sample_strict_rows(rng, n, k, lo, hi)
    borrower_utility = _sample_strict_rows(rng, k, n, lo, hi)
    return MarketInstance(capacity=capacity, budget=budget,
                          lender_utility=lender_utility,
                          borrower_utility=borrower_utility)


def preferences_from_utilities(instance: MarketInstance) -> PreferenceLists:
    """Sort each agent's counterpart indices by strictly descending utility."""
    def sort_rows(mat, side):
        prefs = []
        for i, row in enumerate(mat):
            if len(np.unique(row)) < row.size:
                raise TiedUtilities(f"tied utilities in {side} row {i}")
            # stable argsort on negated values; ties are excluded above
            prefs.append(tuple(int(j) for j in np.argsort(-row, kind="stable")))
        return tuple(prefs)

    return PreferenceLists(
        lender_prefs=sort_rows(instance.lender_utility, "lender"),
        borrower_prefs=sort_rows(instance.borrower_utility, "borrower"),
    )


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations


def validate_instance(instance: MarketInstance) -> ValidationReport:
    """Check every structural invariant; findings go in the report."""
    report = ValidationReport()
    v = report.violations
    c, q = instance.capacity, instance.budget
    ul, ub = instance.lender_utility, instance.borrower_utility
    k, n = c.shape[0], q.shape[0]

    if k < 1 or n < 1:
        v.append("empty side: need K >= 1 and N >= 1")
        return report
    if ul.shape != (n, k):
        v.append(f"lender_utility shape {ul.shape} != ({n}, {k})")
    if ub.shape != (k, n):
        v.append(f"borrower_utility shape {ub.shape} != ({k}, {n})")
    if np.any(c <= 0):
        v.append("non-positive borrower capacity")
    if np.any(q <= 0):
        v.append("non-positive lender budget")
    if c.sum() > q.sum():
        v.append(f"aggregate infeasibility: sum(c)={c.sum():.6g} > "
                 f"sum(q)={q.sum():.6g}")
    for name, mat in (("lender", ul), ("borrower", ub)):
        if mat.shape[0] == 0 or mat.ndim != 2:
            continue
        if np.any(mat < 0) or np.any(mat > 1):
            v.append(f"{name} utilities outside [0, 1]")
        for i, row in enumerate(mat):
            if len(np.unique(row)) < row.size:
                v.append(f"tied utilities in {name} row {i}")
    if not k < n:
        report.warnings.append(
            f"K={k} is not well below N={n}; outside the intended regime")
    return report
