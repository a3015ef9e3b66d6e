"""Kernel backend selection.

The compiled extension (``lendmatch._kernels``, Cython) is preferred; the
pure-numpy fallback is used when the extension is unavailable or when
``LENDMATCH_PURE_PYTHON=1`` is set.  Both expose the same two entry
points with identical pivot and tie-break rules.
"""

from __future__ import annotations

import os

from . import _pykernels
from ._pykernels import (  # noqa: F401  (re-exported constants)
    LP_INFEASIBLE,
    LP_ITERATION_LIMIT,
    LP_OPTIMAL,
    LPResult,
)

if os.environ.get("LENDMATCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels


def backend_name() -> str:
    return "compiled" if _impl is not _pykernels else "pure-python"


def solve_lp(A, b, c, lo, hi, tol=1e-9, max_iter=0,
             start_vstat=None) -> LPResult:
    return _impl.solve_lp(A, b, c, lo, hi, tol, max_iter, start_vstat)


def blocking_matrix(capacity, budget, borrower_utility, lender_utility,
                    assignment):
    return _impl.blocking_matrix(capacity, budget, borrower_utility,
                                 lender_utility, assignment)
