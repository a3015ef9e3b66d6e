# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: bounded-variable simplex and blocking pairs.

Pivot and tie-break rules match ``lendmatch._pykernels`` exactly; the
pure version is the fallback when this extension is not built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

from lendmatch._pykernels import (
    LP_INFEASIBLE,
    LP_ITERATION_LIMIT,
    LP_OPTIMAL,
    LPResult,
)

cnp.import_array()

DEF REFACTOR_EVERY = 150


cdef int _run_simplex(double[:, ::1] AT, double[::1] bvec,
                      double[::1] cvec, double[::1] lofull,
                      double[::1] hifull, cnp.int64_t[::1] basis,
                      cnp.int8_t[::1] vstat, double[::1] xB,
                      double[:, ::1] Binv, double tol, long max_iter,
                      double[::1] y, double[::1] alpha,
                      double[::1] lim_lo, double[::1] lim_up):
    # AT is the constraint matrix transposed (ntot x m): row j is column
    # j of A, so pricing and pivot-column reads are contiguous.
    cdef Py_ssize_t m = AT.shape[1]
    cdef Py_ssize_t ntot = AT.shape[0]
    cdef long it = 0
    cdef long bland_after = max_iter // 2
    cdef Py_ssize_t i, j, e, r
    cdef double dj, score, best_score, sgn, t_bound, t_basic, t_min
    cdef double ar, enter_val, eff_i, t
    cdef bint hit_lower

    while True:
        it += 1
        if it > max_iter:
            return 0
        if it % REFACTOR_EVERY == 0:
            _refactor(AT, bvec, basis, vstat, lofull, hifull, Binv, xB)

        for i in range(m):
            y[i] = 0.0
        for i in range(m):
            ar = cvec[basis[i]]
            if ar != 0.0:
                for j in range(m):
                    y[j] += ar * Binv[i, j]

        e = -1
        best_score = tol
        if it <= bland_after:
            for j in range(ntot):
                if vstat[j] == 2 or hifull[j] - lofull[j] <= tol:
                    continue
                dj = cvec[j]
                for i in range(m):
                    dj -= y[i] * AT[j, i]
                score = dj if vstat[j] == 0 else -dj
                if score > best_score:
                    best_score = score
                    e = j
            if e < 0:
                return 1
        else:
            for j in range(ntot):
                if vstat[j] == 2 or hifull[j] - lofull[j] <= tol:
                    continue
                dj = cvec[j]
                for i in range(m):
                    dj -= y[i] * AT[j, i]
                score = dj if vstat[j] == 0 else -dj
                if score > tol:
                    e = j
                    break
            if e < 0:
                return 1

        sgn = 1.0 if vstat[e] == 0 else -1.0
        for i in range(m):
            alpha[i] = 0.0
            for j in range(m):
                alpha[i] += Binv[i, j] * AT[e, j]

        t_basic = INFINITY
        r = -1
        for i in range(m):
            eff_i = sgn * alpha[i]
            if eff_i > tol:
                lim_lo[i] = (xB[i] - lofull[basis[i]]) / eff_i
            else:
                lim_lo[i] = INFINITY
            if eff_i < -tol:
                lim_up[i] = (hifull[basis[i]] - xB[i]) / (-eff_i)
            else:
                lim_up[i] = INFINITY
            score = lim_lo[i] if lim_lo[i] < lim_up[i] else lim_up[i]
            if score < 0.0:
                score = 0.0
            lim_lo[i] = lim_lo[i] if lim_lo[i] >= 0.0 else 0.0
            lim_up[i] = lim_up[i] if lim_up[i] >= 0.0 else 0.0
            if score < t_basic:
                t_basic = score
                r = i
        if it > bland_after and r >= 0:
            t_min = t_basic
            for i in range(m):
                score = lim_lo[i] if lim_lo[i] < lim_up[i] else lim_up[i]
                if score <= t_min + 1e-12 and (r < 0
                                               or basis[i] < basis[r]):
                    r = i
            t_basic = lim_lo[r] if lim_lo[r] < lim_up[r] else lim_up[r]

        t_bound = hifull[e] - lofull[e]
        if t_bound <= t_basic or r < 0:
            if t_bound == INFINITY:
                return 0  # unbounded ray; cannot occur for valid input
            for i in range(m):
                xB[i] -= t_bound * sgn * alpha[i]
            vstat[e] = 1 - vstat[e]
            continue

        t = t_basic
        hit_lower = lim_lo[r] <= lim_up[r]
        enter_val = (lofull[e] + t) if sgn > 0 else (hifull[e] - t)
        for i in range(m):
            xB[i] -= t * sgn * alpha[i]
        vstat[basis[r]] = 0 if hit_lower else 1
        xB[r] = enter_val
        ar = alpha[r]
        for j in range(m):
            Binv[r, j] /= ar
        for i in range(m):
            if i != r and alpha[i] != 0.0:
                for j in range(m):
                    Binv[i, j] -= alpha[i] * Binv[r, j]
        basis[r] = e
        vstat[e] = 2


cdef void _refactor(double[:, ::1] AT, double[::1] bvec,
                    cnp.int64_t[::1] basis, cnp.int8_t[::1] vstat,
                    double[::1] lofull, double[::1] hifull,
                    double[:, ::1] Binv, double[::1] xB):
    AT_np = np.asarray(AT)
    basis_np = np.asarray(basis)
    Binv_new = np.linalg.inv(AT_np[basis_np].T)
    vstat_np = np.asarray(vstat)
    xn = np.where(vstat_np == 1, np.asarray(hifull), np.asarray(lofull))
    xn[vstat_np == 2] = 0.0
    xB_new = Binv_new @ (np.asarray(bvec) - AT_np.T @ xn)
    cdef Py_ssize_t m = AT.shape[1]
    cdef Py_ssize_t i, j
    cdef double[:, ::1] bn = Binv_new
    cdef double[::1] xb = xB_new
    for i in range(m):
        xB[i] = xb[i]
        for j in range(m):
            Binv[i, j] = bn[i, j]


def solve_lp(A, b, c, lo, hi, double tol=1e-9, long max_iter=0,
             start_vstat=None):
    """Maximise c.x subject to A x <= b and lo <= x <= hi."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    if max_iter <= 0:
        max_iter = 200 * (m + n) + 2000

    Afull = np.hstack([A, np.eye(m)])
    lofull = np.concatenate([np.asarray(lo, dtype=np.float64), np.zeros(m)])
    hifull = np.concatenate([np.asarray(hi, dtype=np.float64),
                             np.full(m, np.inf)])
    cfull = np.concatenate([np.asarray(c, dtype=np.float64), np.zeros(m)])

    basis = np.arange(n, n + m, dtype=np.int64)
    vstat = np.zeros(n + m, dtype=np.int8)
    if start_vstat is not None:
        vstat[:n] = np.asarray(start_vstat, dtype=np.int8)
    vstat[basis] = 2
    x_init = np.where(vstat[:n] == 1, hifull[:n], lofull[:n])
    resid = b - A @ x_init

    art_rows = np.flatnonzero(resid < 0.0)
    cdef Py_ssize_t n_art = art_rows.size
    if n_art:
        art_cols = np.zeros((m, n_art))
        art_cols[art_rows, np.arange(n_art)] = -1.0
        Afull = np.hstack([Afull, art_cols])
        lofull = np.concatenate([lofull, np.zeros(n_art)])
        hifull = np.concatenate([hifull, np.full(n_art, np.inf)])
        cfull = np.concatenate([cfull, np.zeros(n_art)])
        vstat = np.concatenate([vstat, np.zeros(n_art, dtype=np.int8)])
        for idx, i_row in enumerate(art_rows):
            vstat[basis[i_row]] = 0
            vstat[n + m + idx] = 2
            basis[i_row] = n + m + idx

    AT = np.ascontiguousarray(Afull.T)
    xB = np.abs(resid)
    # initial basis is slack/artificial columns, i.e. diag(+-1)
    Binv = np.eye(m)
    Binv[art_rows, art_rows] = -1.0

    y = np.empty(m)
    alpha = np.empty(m)
    lim_lo = np.empty(m)
    lim_up = np.empty(m)

    cdef int ok
    if n_art:
        c1 = np.zeros_like(cfull)
        c1[n + m:] = -1.0
        ok = _run_simplex(AT, b, c1, lofull, hifull, basis, vstat, xB,
                          Binv, tol, max_iter, y, alpha, lim_lo, lim_up)
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
        hifull[n + m:] = 0.0

    ok = _run_simplex(AT, b, cfull, lofull, hifull, basis, vstat, xB,
                      Binv, tol, max_iter, y, alpha, lim_lo, lim_up)
    x = np.where(vstat[:n] == 1, hifull[:n], lofull[:n])
    for i_row in range(m):
        if basis[i_row] < n:
            x[basis[i_row]] = xB[i_row]
    obj = float(np.asarray(c, dtype=np.float64) @ x)
    status = LP_OPTIMAL if ok else LP_ITERATION_LIMIT
    return LPResult(status, obj, x, np.empty(0, dtype=np.int64),
                    vstat[:n].copy())


def blocking_matrix(capacity, budget, borrower_utility, lender_utility,
                    assignment):
    """Minimal blocking-pair indicators for a binary assignment."""
    cdef double[::1] c = np.ascontiguousarray(capacity, dtype=np.float64)
    cdef double[::1] q = np.ascontiguousarray(budget, dtype=np.float64)
    cdef double[:, ::1] ub = np.ascontiguousarray(borrower_utility,
                                                  dtype=np.float64)
    cdef double[:, ::1] ul = np.ascontiguousarray(lender_utility,
                                                  dtype=np.float64)
    cdef double[:, ::1] x = np.ascontiguousarray(assignment,
                                                 dtype=np.float64)
    cdef Py_ssize_t k = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    w_np = np.zeros((k, n), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] w = w_np
    cdef Py_ssize_t b, l, l2, b2
    cdef double lhs
    for b in range(k):
        for l in range(n):
            lhs = c[b] * x[b, l]
            for l2 in range(n):
                if ub[b, l2] > ub[b, l]:
                    lhs += c[b] * x[b, l2]
            for b2 in range(k):
                if ul[l, b2] > ul[l, b]:
                    lhs += q[l] * x[b2, l]
            if lhs < c[b]:
                w[b, l] = 1
    return w_np
