"""Pure-numpy compute kernels: bounded-variable simplex and blocking pairs.

This is the fallback backend; ``lendmatch._kernels`` is the compiled twin
with identical pivot rules.  Both are selected through
:mod:`lendmatch.backend`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LP_OPTIMAL = 0
LP_INFEASIBLE = 1
LP_ITERATION_LIMIT = 2

_REFACTOR_EVERY = 150


@dataclass
class LPResult:
    status: int
    objective: float
    x: np.ndarray                # structural variable values
    infeasible_rows: np.ndarray  # rows left with residual infeasibility
    vstat: np.ndarray | None = None  # final structural statuses (warm hint)


def _refactor(Afull, b, basis, vstat, lofull, hifull, Binv, xB):
    Binv[:] = np.linalg.inv(Afull[:, basis])
    xn = np.where(vstat == 1, hifull, lofull)
    xn[vstat == 2] = 0.0
    xB[:] = Binv @ (b - Afull @ xn)


def _run_simplex(Afull, b, cvec, lofull, hifull, basis, vstat, xB, Binv,
                 tol, max_iter):
    """Bounded-variable simplex iterations on a maximisation problem.

    ``vstat``: 0 nonbasic at lower bound, 1 nonbasic at upper, 2 basic.
    Mutates basis/vstat/xB/Binv in place.  Dantzig pricing with a switch
    to Bland's rule late in the iteration budget to escape cycling.
    Returns True when optimal, False on iteration limit.
    """
    m, _ = Afull.shape
    free_col = (hifull - lofull) > tol  # fixed columns never enter
    bland_after = max_iter // 2
    it = 0
    while True:
        it += 1
        if it > max_iter:
            return False
        if it % _REFACTOR_EVERY == 0:
            _refactor(Afull, b, basis, vstat, lofull, hifull, Binv, xB)

        y = cvec[basis] @ Binv
        d = cvec - y @ Afull
        score = np.where(vstat == 0, d, np.where(vstat == 1, -d, -np.inf))
        score[~free_col] = -np.inf
        if it <= bland_after:
            e = int(np.argmax(score))
            if score[e] <= tol:
                return True
        else:
            cand = np.flatnonzero(score > tol)
            if cand.size == 0:
                return True
            e = int(cand[0])

        sgn = 1.0 if vstat[e] == 0 else -1.0
        alpha = Binv @ Afull[:, e]
        eff = sgn * alpha

        lo_b = lofull[basis]
        hi_b = hifull[basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            lim_lo = np.where(eff > tol, (xB - lo_b) / eff, np.inf)
            lim_up = np.where(eff < -tol, (hi_b - xB) / (-eff), np.inf)
        limits = np.maximum(np.minimum(lim_lo, lim_up), 0.0)
        t_bound = hifull[e] - lofull[e]

        if it <= bland_after:
            r = int(np.argmin(limits))
        else:
            t_min = limits.min()
            ties = np.flatnonzero(limits <= t_min + 1e-12)
            r = int(ties[np.argmin(basis[ties])])
        t_basic = limits[r]

        if t_bound <= t_basic:
            if not np.isfinite(t_bound):
                return False  # unbounded ray; cannot occur for valid input
            xB -= t_bound * eff
            vstat[e] = 1 - vstat[e]
            continue

        t = t_basic
        hit_lower = lim_lo[r] <= lim_up[r]
        enter_val = (lofull[e] + t) if sgn > 0 else (hifull[e] - t)
        xB -= t * eff
        leaving = basis[r]
        vstat[leaving] = 0 if hit_lower else 1
        xB[r] = enter_val
        ar = alpha[r]
        Binv[r, :] /= ar
        other = np.arange(m) != r
        Binv[other, :] -= np.outer(alpha[other], Binv[r, :])
        basis[r] = e
        vstat[e] = 2


def solve_lp(A, b, c, lo, hi, tol=1e-9, max_iter=0, start_vstat=None):
    """Maximise c.x subject to A x <= b and lo <= x <= hi.

    Two phases: artificial variables repair the rows violated by the
    at-bound start, then the true objective is optimised.
    ``start_vstat`` assigns each structural column an initial bound
    (0 lower, 1 upper) — a warm-start hint that shrinks phase 1 when it
    comes from a nearby solved LP's ``LPResult.vstat``.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    if max_iter <= 0:
        max_iter = 200 * (m + n) + 2000

    Afull = np.hstack([A, np.eye(m)])
    lofull = np.concatenate([lo, np.zeros(m)])
    hifull = np.concatenate([hi, np.full(m, np.inf)])
    cfull = np.concatenate([c, np.zeros(m)])

    basis = np.arange(n, n + m)
    vstat = np.zeros(n + m, dtype=np.int8)
    if start_vstat is not None:
        vstat[:n] = np.asarray(start_vstat, dtype=np.int8)
    vstat[basis] = 2
    x_init = np.where(vstat[:n] == 1, hi, lo)
    resid = b - A @ x_init

    art_rows = np.flatnonzero(resid < 0.0)
    n_art = art_rows.size
    if n_art:
        art_cols = np.zeros((m, n_art))
        art_cols[art_rows, np.arange(n_art)] = -1.0
        Afull = np.hstack([Afull, art_cols])
        lofull = np.concatenate([lofull, np.zeros(n_art)])
        hifull = np.concatenate([hifull, np.full(n_art, np.inf)])
        cfull = np.concatenate([cfull, np.zeros(n_art)])
        vstat = np.concatenate([vstat, np.zeros(n_art, dtype=np.int8)])
        # violated rows get their artificial as the basic variable
        for idx, i in enumerate(art_rows):
            vstat[basis[i]] = 0
            vstat[n + m + idx] = 2
            basis[i] = n + m + idx

    bvec = b.copy()
    xB = np.abs(resid)
    # initial basis is slack/artificial columns, i.e. diag(+-1)
    Binv = np.eye(m)
    Binv[art_rows, art_rows] = -1.0

    if n_art:
        c1 = np.zeros_like(cfull)
        c1[n + m:] = -1.0
        ok = _run_simplex(Afull, bvec, c1, lofull, hifull, basis, vstat, xB,
                          Binv, tol, max_iter)
        art_vals = np.zeros(n_art)
        for idx in range(n_art):
            pos = np.flatnonzero(basis == n + m + idx)
            if pos.size:
                art_vals[idx] = xB[pos[0]]
        if not ok:
            return LPResult(LP_ITERATION_LIMIT, np.nan, np.full(n, np.nan),
                            art_rows[art_vals > tol])
        if art_vals.sum() > 1e-7:
            return LPResult(LP_INFEASIBLE, np.nan, np.full(n, np.nan),
                            art_rows[art_vals > 1e-9])
        hifull[n + m:] = 0.0  # lock artificials at zero for phase 2

    ok = _run_simplex(Afull, bvec, cfull, lofull, hifull, basis, vstat, xB,
                      Binv, tol, max_iter)
    x = np.where(vstat[:n] == 1, hifull[:n], lofull[:n])
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = xB[i]
    obj = float(c @ x)
    status = LP_OPTIMAL if ok else LP_ITERATION_LIMIT
    return LPResult(status, obj, x, np.empty(0, dtype=np.int64),
                    vstat[:n].copy())


def blocking_matrix(capacity, budget, borrower_utility, lender_utility,
                    assignment):
    """Minimal blocking-pair indicators for a binary assignment.

    Pair (b, l) is non-blocking when
    ``c_b x_bl + c_b * sum_{l' pref by b over l} x_bl'
    + q_l * sum_{b' pref by l over b} x_b'l >= c_b``.
    """
    x = np.asarray(assignment, dtype=np.float64)
    k, n = x.shape
    lhs = capacity[:, None] * x
    for b in range(k):
        pref = borrower_utility[b][None, :] > borrower_utility[b][:, None]
        lhs[b] += capacity[b] * (pref @ x[b])
    for l in range(n):
        pref = lender_utility[l][None, :] > lender_utility[l][:, None]
        lhs[:, l] += budget[l] * (pref @ x[:, l])
    return (lhs < capacity[:, None]).astype(np.int64)
