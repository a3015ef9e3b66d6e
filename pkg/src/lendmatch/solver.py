"""Exact and heuristic solvers for the stable-matching integer program.

The binary program maximises
``lambda1 * sum u[l][b] x_bl - lambda2 * sum w_bl`` subject to each
lender funding at most one borrower and each matched borrower being
covered by its lenders' budgets.  The blocking indicators w are never
searched over: for any fixed x the minimal consistent w is determined
pair by pair (see :func:`lendmatch.stability.blocking_pairs`), so the
branch-and-bound explores x-space only.  Bounds come from the LP
relaxation (bounded-variable simplex, w relaxed to [0, 1] with the same
per-pair elimination applied inside the relaxation).
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import NodeLimitExceeded
from .model import MarketInstance
from .stability import blocking_pairs, objective_value

_PRUNE_MARGIN = 1e-7   # keep nodes whose bound is within this of the incumbent
_TIE_TOL = 1e-9        # objectives closer than this are tie-broken lexically
_INT_TOL = 1e-6


@dataclass(frozen=True)
class ObjectiveWeights:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("weights must be nonnegative")
        if self.lambda1 == 0 and self.lambda2 == 0:
            raise ValueError("weights cannot both be zero")


@dataclass
class SolverOptions:
    mode: str = "exact"              # "exact" | "heuristic"
    node_limit: int = 200_000
    pivot_tol: float = 1e-9
    integrality_tol: float = _INT_TOL
    time_budget: float | None = None  # seconds, exact mode only

    def __post_init__(self):
        if self.mode not in ("exact", "heuristic"):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.pivot_tol <= 0 or self.integrality_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class Matching:
    assignment: np.ndarray       # (K, N) binary
    blocking: np.ndarray         # (K, N) binary, minimal w for assignment
    objective: float
    lender_match: np.ndarray     # (N,) borrower index or -1
    borrower_match: tuple        # per borrower, tuple of lender indices
    status: str                  # "optimal" | "heuristic" | "infeasible"
    certificate: tuple = ()      # borrowers provably uncoverable (infeasible)
    nodes: int = 0
    stats: dict = field(default_factory=dict)


def lex_less(x1, x2) -> bool:
    """Strict row-major lexicographic order on assignment matrices."""
    f1, f2 = np.ravel(x1), np.ravel(x2)
    diff = np.flatnonzero(f1 != f2)
    return bool(diff.size) and f1[diff[0]] < f2[diff[0]]


def _make_matching(instance, x, weights, U, status, nodes=0, certificate=(),
                   stats=None, lender_pref=None):
    w, _ = blocking_pairs(instance, x, lender_utility=lender_pref)
    obj = objective_value(instance, x, w, weights, U)
    lender_match = np.full(instance.num_lenders, -1, dtype=np.int64)
    for b, l in zip(*np.nonzero(x)):
        lender_match[l] = b
    borrower_match = tuple(
        tuple(int(l) for l in np.flatnonzero(x[b]))
        for b in range(instance.num_borrowers))
    return Matching(assignment=np.asarray(x, dtype=np.int64), blocking=w,
                    objective=obj, lender_match=lender_match,
                    borrower_match=borrower_match, status=status,
                    certificate=tuple(certificate), nodes=nodes,
                    stats=stats or {})


def _build_lp(instance, U, weights, lender_pref=None):
    """Dense <=-form LP data for the relaxation.

    Columns: x variables (index b*N + l), then w variables in the same
    order.  Rows: lender single-match, borrower coverage (negated),
    then one stability row per (b, l) (negated).  ``lender_pref``
    supplies the lender-side preference order for the stability rows
    (defaults to the instance's lender utilities).
    """
    c_b, q = instance.capacity, instance.budget
    ub = instance.borrower_utility
    ul = instance.lender_utility if lender_pref is None else lender_pref
    k, n = instance.num_borrowers, instance.num_lenders
    nx = k * n
    m = n + k + nx
    A = np.zeros((m, 2 * nx))
    rhs = np.zeros(m)

    for l in range(n):
        A[l, l:nx:n] = 1.0
        rhs[l] = 1.0
    for b in range(k):
        A[n + b, b * n:(b + 1) * n] = -q
        rhs[n + b] = -c_b[b]
    base = n + k
    for b in range(k):
        pref_l = ub[b][None, :] > ub[b][:, None]   # [l, l'] b prefers l'
        for l in range(n):
            # Integer-equivalent form of the stability row: with at most
            # one borrower per lender, the budget term can only satisfy
            # the pair on its own when q_l covers c_b outright, so its
            # coefficient collapses to an indicator.  Same integral
            # feasible set, much tighter LP relaxation.
            row = base + b * n + l
            A[row, b * n:(b + 1) * n] -= pref_l[l].astype(np.float64)
            A[row, b * n + l] -= 1.0
            better_b = ul[l] > ul[l][b]            # borrowers l prefers to b
            if q[l] >= c_b[b]:
                A[row, l:nx:n] -= better_b.astype(np.float64)
            A[row, nx + b * n + l] = -1.0
            rhs[row] = -1.0

    c_obj = np.zeros(2 * nx)
    c_obj[:nx] = weights.lambda1 * U.T.reshape(-1)   # (K, N) order
    c_obj[nx:] = -weights.lambda2
    return A, rhs, c_obj


def deferred_acceptance_warm_start(instance: MarketInstance,
                                   lender_utility=None):
    """Lender-proposing deferred acceptance adapted to budget cover.

    Lenders propose down their preference lists; a borrower holds
    proposers while its held budget is below its capacity and, once
    covered, swaps in a preferred proposer only when dropping its worst
    held lender keeps coverage.  The result always satisfies the
    one-borrower-per-lender constraint; coverage is best effort.
    """
    ul = instance.lender_utility if lender_utility is None else lender_utility
    ub = instance.borrower_utility
    c_b, q = instance.capacity, instance.budget
    k, n = instance.num_borrowers, instance.num_lenders

    pref = [np.argsort(-ul[l], kind="stable") for l in range(n)]
    nxt = [0] * n
    held = [set() for _ in range(k)]
    held_budget = np.zeros(k)
    free = deque(range(n))
    while free:
        l = free.popleft()
        if nxt[l] >= k:
            continue
        b = int(pref[l][nxt[l]])
        nxt[l] += 1
        if held_budget[b] < c_b[b]:
            held[b].add(l)
            held_budget[b] += q[l]
            continue
        worst = min(held[b], key=lambda j: ub[b][j])
        if (ub[b][l] > ub[b][worst]
                and held_budget[b] - q[worst] + q[l] >= c_b[b]):
            held[b].remove(worst)
            held[b].add(l)
            held_budget[b] += q[l] - q[worst]
            free.append(worst)
        else:
            free.append(l)

    x = np.zeros((k, n), dtype=np.int64)
    for b in range(k):
        for l in held[b]:
            x[b, l] = 1
    return x


def _coverage_ok(instance, x, tol=1e-9):
    covered = x @ instance.budget
    return np.all(covered >= instance.capacity - tol)


def _repair_coverage(instance, x):
    """Greedy repair: route unmatched or sparable lenders to uncovered
    borrowers.  May fail; caller checks."""
    c_b, q = instance.capacity, instance.budget
    k, n = instance.num_borrowers, instance.num_lenders
    for _ in range(k * n):
        covered = x @ q
        deficit = c_b - covered
        if np.all(deficit <= 1e-9):
            return x
        b = int(np.argmax(deficit))
        unmatched = np.flatnonzero(x.sum(axis=0) == 0)
        if unmatched.size:
            l = int(unmatched[np.argmax(q[unmatched])])
            x[b, l] = 1
            continue
        moved = False
        for l in np.argsort(-q):   # try sparable lenders, biggest first
            src = np.flatnonzero(x[:, l])
            if src.size == 0:
                continue
            src = int(src[0])
            if src != b and covered[src] - q[l] >= c_b[src] - 1e-9:
                x[src, l] = 0
                x[b, l] = 1
                moved = True
                break
        if not moved:
            return x
    return x


def _objective_of(instance, x, weights, U, lender_pref=None):
    w, _ = blocking_pairs(instance, x, lender_utility=lender_pref)
    return objective_value(instance, x, w, weights, U)


def _hill_climb(instance, x, weights, U, max_passes=30, lender_pref=None):
    """Single-lender reassignment moves that keep feasibility."""
    c_b, q = instance.capacity, instance.budget
    k, n = instance.num_borrowers, instance.num_lenders
    best = _objective_of(instance, x, weights, U, lender_pref)
    for _ in range(max_passes):
        improved = False
        for l in range(n):
            for dst in list(range(k)) + [-1]:
                src = np.flatnonzero(x[:, l])
                src = int(src[0]) if src.size else -1
                if dst == src:
                    continue
                if src >= 0 and (x[src] @ q) - q[l] < c_b[src] - 1e-9:
                    break  # l is load-bearing for its borrower
                if src >= 0:
                    x[src, l] = 0
                if dst >= 0:
                    x[dst, l] = 1
                cand = _objective_of(instance, x, weights, U, lender_pref)
                if cand > best + 1e-12:
                    best = cand
                    improved = True
                else:
                    if dst >= 0:
                        x[dst, l] = 0
                    if src >= 0:
                        x[src, l] = 1
        if not improved:
            break
    return x


def _solve_heuristic(instance, U, weights, options, lender_pref=None):
    x = deferred_acceptance_warm_start(instance, U)
    if not _coverage_ok(instance, x):
        x = _repair_coverage(instance, x)
    if not _coverage_ok(instance, x):
        uncovered = np.flatnonzero(x @ instance.budget
                                   < instance.capacity - 1e-9)
        return _make_matching(instance, np.zeros_like(x), weights, U,
                              "infeasible",
                              certificate=[int(b) for b in uncovered],
                              lender_pref=lender_pref)
    x = _hill_climb(instance, x, weights, U, lender_pref=lender_pref)
    return _make_matching(instance, x, weights, U, "heuristic",
                          lender_pref=lender_pref)


def _branch_var_for_w(jw, nlo, nhi, k, n):
    """Pick a free x variable whose fixing can resolve a fractional
    blocking indicator: prefer the pair itself, then its stability row.
    Returns -1 when all x variables are fixed."""
    b, l = divmod(jw, n)
    candidates = [b * n + l]
    candidates += list(range(b * n, (b + 1) * n))
    candidates += list(range(l, k * n, n))
    for j in candidates:
        if nhi[j] - nlo[j] > 0.5:
            return j
    free = np.flatnonzero(nhi - nlo > 0.5)
    return int(free[0]) if free.size else -1


def _bnb(instance, U, weights, options, A, rhs, c_obj, lo, hi, root_hint,
         best_x, best_obj, deadline, node_limit, lender_pref=None,
         existence=False):
    """Best-first branch and bound over the x block of the LP columns.

    Returns ``(best_x, best_obj, nodes, certificate, complete)``.  In
    ``existence`` mode ``best_obj`` is a fixed target: the search
    returns the first integral candidate within ``_TIE_TOL`` of it (or
    proves there is none) and a blown node/time budget ends the search
    with ``complete=False`` instead of raising.
    """
    k, n = instance.num_borrowers, instance.num_lenders
    nx = k * n
    certificate = ()
    nodes = 0
    seq = 0
    heap = [(-np.inf, seq, lo[:nx].copy(), hi[:nx].copy(), root_hint)]
    while heap:
        neg_bound, _, nlo, nhi, hint = heapq.heappop(heap)
        if (-neg_bound <= best_obj - _PRUNE_MARGIN
                and (existence or best_x is not None)):
            continue
        if nodes >= node_limit or (deadline is not None
                                   and time.monotonic() > deadline):
            if existence:
                return best_x, best_obj, nodes, certificate, False
            raise NodeLimitExceeded(nodes, best=best_x)
        nodes += 1
        lo[:nx], hi[:nx] = nlo, nhi
        res = backend.solve_lp(A, rhs, c_obj, lo, hi, tol=options.pivot_tol,
                               start_vstat=hint)
        if res.status == backend.LP_INFEASIBLE:
            rows = [int(r) - n for r in res.infeasible_rows
                    if n <= r < n + k]
            if rows:
                certificate = tuple(sorted(set(rows)))
            continue
        if res.status == backend.LP_ITERATION_LIMIT:
            free = np.flatnonzero(nhi - nlo > 0.5)
            if free.size == 0:
                continue
            j = int(free[0])  # cannot bound this node; branch blindly
            for val in (0.0, 1.0):
                clo, chi = nlo.copy(), nhi.copy()
                clo[j] = chi[j] = val
                seq += 1
                heapq.heappush(heap, (neg_bound, seq, clo, chi, hint))
            continue
        bound = res.objective
        if (bound <= best_obj - _PRUNE_MARGIN
                and (existence or best_x is not None)):
            continue
        xx = np.clip(res.x[:nx], 0.0, 1.0)
        frac = np.minimum(xx, 1.0 - xx)
        j = int(np.argmax(frac))
        if frac[j] <= options.integrality_tol:
            xi = np.round(xx).reshape(k, n)
            if _coverage_ok(instance, xi, tol=1e-6):
                cand = _objective_of(instance, xi, weights, U, lender_pref)
                if existence:
                    if cand > best_obj - _TIE_TOL:
                        return (xi.astype(np.float64).reshape(-1), cand,
                                nodes, certificate, True)
                elif (cand > best_obj + _TIE_TOL
                        or (cand > best_obj - _TIE_TOL
                            and (best_x is None
                                 or lex_less(xi, best_x.reshape(k, n))))):
                    best_obj = cand
                    best_x = xi.astype(np.float64).reshape(-1)
            # integral x does not close the node: the relaxed w part can
            # still be fractional, leaving the bound above the candidate
            ww = np.clip(res.x[nx:], 0.0, 1.0)
            wfrac = np.minimum(ww, 1.0 - ww)
            if wfrac.max(initial=0.0) <= options.integrality_tol:
                continue  # relaxation tight; candidate is subtree optimum
            j = _branch_var_for_w(int(np.argmax(wfrac)), nlo, nhi, k, n)
            if j < 0:
                continue  # every x variable fixed; true leaf
        child_hint = (hint if res.vstat is None else
                      np.where(res.vstat == 2,
                               (res.x > 0.5).astype(np.int8),
                               res.vstat).astype(np.int8))
        for val in (0.0, 1.0):
            clo, chi = nlo.copy(), nhi.copy()
            clo[j] = chi[j] = val
            seq += 1
            heapq.heappush(heap, (-bound, seq, clo, chi, child_hint))
    if existence:
        return None, best_obj, nodes, certificate, True
    return best_x, best_obj, nodes, certificate, True


def _lex_polish(instance, U, weights, options, A, rhs, c_obj, best_x,
                best_obj, deadline, node_budget, lender_pref):
    """Sequential fixing to the lexicographically smallest optimum.

    Walks the x variables in row-major order; wherever the incumbent
    has a 1, an existence search checks for an equal-objective solution
    (within ``_TIE_TOL``) with that variable at 0 and the scanned
    prefix fixed, adopting the witness when one exists.  Runs within
    the remaining node budget; exhausting it keeps the current
    incumbent, which is always some exact optimum.
    """
    k, n = instance.num_borrowers, instance.num_lenders
    nx = k * n
    best = np.round(np.asarray(best_x)).astype(np.int64).reshape(-1)
    nodes = 0
    for j in range(nx):
        if best[j] == 0 or node_budget - nodes <= 0:
            continue
        lo = np.zeros(2 * nx)
        hi = np.ones(2 * nx)
        lo[:j] = hi[:j] = best[:j]
        lo[j] = hi[j] = 0.0
        xi = best.reshape(k, n)
        w0, _ = blocking_pairs(instance, xi, lender_utility=lender_pref)
        hint = np.concatenate([best, w0.reshape(-1)]).astype(np.int8)
        found, _, used, _, complete = _bnb(
            instance, U, weights, options, A, rhs, c_obj, lo, hi, hint,
            None, best_obj, deadline, node_budget - nodes,
            lender_pref=lender_pref, existence=True)
        nodes += used
        if not complete:
            break
        if found is not None:
            best = np.round(found).astype(np.int64)
    return best.astype(np.float64), nodes


def _solve_exact(instance, U, weights, options, warm_assignment=None,
                 lender_pref=None):
    k, n = instance.num_borrowers, instance.num_lenders
    nx = k * n
    A, rhs, c_obj = _build_lp(instance, U, weights, lender_pref)
    lo = np.zeros(2 * nx)
    hi = np.ones(2 * nx)
    # root start: w at its upper bound satisfies every stability row, so
    # phase 1 only has to repair the coverage rows; children inherit the
    # parent vertex's bound statuses, which keeps their phase 1 short
    root_hint = np.concatenate([np.zeros(nx, dtype=np.int8),
                                np.ones(nx, dtype=np.int8)])

    best_x = None
    best_obj = -np.inf

    da = deferred_acceptance_warm_start(instance, U)
    if _coverage_ok(instance, da):
        best_x = da.astype(np.float64)
        best_obj = _objective_of(instance, da, weights, U, lender_pref)
    if warm_assignment is not None:
        wa = np.asarray(warm_assignment, dtype=np.int64)
        if wa.shape == (k, n) and _coverage_ok(instance, wa):
            wa_obj = _objective_of(instance, wa, weights, U, lender_pref)
            if (wa_obj > best_obj + _TIE_TOL
                    or (wa_obj > best_obj - _TIE_TOL
                        and best_x is not None
                        and lex_less(wa.ravel(), best_x.ravel()))):
                best_x = wa.astype(np.float64)
                best_obj = wa_obj

    if best_x is not None:
        # the incumbent with its minimal blocking indicators satisfies
        # every row, so the root LP needs no phase-1 repair at all
        xi0 = np.round(best_x).reshape(k, n).astype(np.int64)
        w0, _ = blocking_pairs(instance, xi0, lender_utility=lender_pref)
        root_hint = np.concatenate([xi0.reshape(-1),
                                    w0.reshape(-1)]).astype(np.int8)

    deadline = (time.monotonic() + options.time_budget
                if options.time_budget else None)
    best_x, best_obj, nodes, certificate, _ = _bnb(
        instance, U, weights, options, A, rhs, c_obj, lo, hi, root_hint,
        best_x, best_obj, deadline, options.node_limit,
        lender_pref=lender_pref)

    if best_x is None:
        zero = np.zeros((k, n), dtype=np.int64)
        return _make_matching(instance, zero, weights, U, "infeasible",
                              nodes=nodes,
                              certificate=certificate or tuple(range(k)),
                              lender_pref=lender_pref)
    best_x, polish_nodes = _lex_polish(
        instance, U, weights, options, A, rhs, c_obj, best_x, best_obj,
        deadline, options.node_limit - nodes, lender_pref)
    nodes += polish_nodes
    xi = np.round(best_x).reshape(k, n).astype(np.int64)
    return _make_matching(instance, xi, weights, U, "optimal", nodes=nodes,
                          lender_pref=lender_pref)


def _check_override(instance, U):
    n, k = instance.num_lenders, instance.num_borrowers
    U = np.asarray(U, dtype=np.float64)
    if U.shape != (n, k):
        raise ValueError(f"utility override shape {U.shape} != ({n}, {k})")
    return U


def solve_matching(instance: MarketInstance, weights: ObjectiveWeights,
                   utility_override=None,
                   options: SolverOptions | None = None,
                   warm_start=None) -> Matching:
    """Solve the learning-side program over lender utilities.

    ``warm_start`` optionally supplies a feasible (K, N) assignment used
    as the initial incumbent (e.g. the previous step's matching in the
    simulation loop); it never changes the returned optimum, only the
    amount of search needed to prove it.

    ``utility_override`` replaces the lender utility matrix throughout
    the program — objective term, stability rows, and the derived
    blocking indicators (this is how the bandit loop injects its
    optimistic indices while borrower utilities stay fixed); it must
    have strict within-row order.
    """
    options = options or SolverOptions()
    U = (instance.lender_utility if utility_override is None
         else _check_override(instance, utility_override))
    if options.mode == "heuristic":
        return _solve_heuristic(instance, U, weights, options,
                                lender_pref=U)
    return _solve_exact(instance, U, weights, options,
                        warm_assignment=warm_start, lender_pref=U)


def solve_optimal_combined(instance: MarketInstance,
                           weights: ObjectiveWeights,
                           options: SolverOptions | None = None) -> Matching:
    """Hindsight baseline: same program over u_b(l) + u_l(b)."""
    options = options or SolverOptions()
    U = instance.lender_utility + instance.borrower_utility.T
    if options.mode == "heuristic":
        return _solve_heuristic(instance, U, weights, options)
    return _solve_exact(instance, U, weights, options)
