"""Both kernel backends against scipy's LP solver and each other."""

import numpy as np
import pytest
from scipy.optimize import linprog

from lendmatch import _pykernels
from lendmatch import backend

IMPLS = [pytest.param(_pykernels, id="pure-python")]
try:
    from lendmatch import _kernels
    IMPLS.append(pytest.param(_kernels, id="compiled"))
except ImportError:  # extension not built in this environment
    _kernels = None


def _random_lp(rng, m, n):
    A = rng.normal(size=(m, n))
    x_feas = rng.uniform(0.2, 0.8, size=n)
    b = A @ x_feas + rng.uniform(0.0, 1.0, size=m)
    c = rng.normal(size=n)
    lo = np.zeros(n)
    hi = np.ones(n)
    # fix a few variables, as branch-and-bound nodes do
    for j in rng.choice(n, size=n // 4, replace=False):
        v = float(rng.integers(0, 2))
        lo[j] = hi[j] = v
    return A, b, c, lo, hi


@pytest.mark.parametrize("impl", IMPLS)
def test_solve_lp_matches_scipy(impl):
    rng = np.random.default_rng(5)
    for _ in range(60):
        m, n = int(rng.integers(3, 12)), int(rng.integers(3, 14))
        A, b, c, lo, hi = _random_lp(rng, m, n)
        res = impl.solve_lp(A, b, c, lo, hi)
        ref = linprog(-c, A_ub=A, b_ub=b,
                      bounds=list(zip(lo, hi)), method="highs")
        if ref.status == 0:
            assert res.status == _pykernels.LP_OPTIMAL
            assert res.objective == pytest.approx(-ref.fun, abs=1e-8)
            assert np.all(A @ res.x <= b + 1e-8)
            assert np.all(res.x >= lo - 1e-9)
            assert np.all(res.x <= hi + 1e-9)
        else:
            assert res.status == _pykernels.LP_INFEASIBLE


@pytest.mark.parametrize("impl", IMPLS)
def test_solve_lp_infeasible_rows_reported(impl):
    # x1 + x2 <= 1 and -x1 - x2 <= -3 cannot both hold on [0, 1]^2
    A = np.array([[1.0, 1.0], [-1.0, -1.0]])
    b = np.array([1.0, -3.0])
    c = np.array([1.0, 1.0])
    res = impl.solve_lp(A, b, c, np.zeros(2), np.ones(2))
    assert res.status == _pykernels.LP_INFEASIBLE
    assert 1 in set(int(r) for r in res.infeasible_rows)


@pytest.mark.parametrize("impl", IMPLS)
def test_solve_lp_warm_hint_changes_nothing(impl):
    rng = np.random.default_rng(11)
    for _ in range(25):
        m, n = int(rng.integers(3, 10)), int(rng.integers(3, 12))
        A, b, c, lo, hi = _random_lp(rng, m, n)
        cold = impl.solve_lp(A, b, c, lo, hi)
        hint = rng.integers(0, 2, size=n).astype(np.int8)
        warm = impl.solve_lp(A, b, c, lo, hi, 1e-9, 0, hint)
        assert cold.status == warm.status
        if cold.status == _pykernels.LP_OPTIMAL:
            assert warm.objective == pytest.approx(cold.objective, abs=1e-8)


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
def test_backends_agree_exactly():
    rng = np.random.default_rng(23)
    for _ in range(40):
        m, n = int(rng.integers(3, 10)), int(rng.integers(3, 12))
        A, b, c, lo, hi = _random_lp(rng, m, n)
        rp = _pykernels.solve_lp(A, b, c, lo, hi)
        rc = _kernels.solve_lp(A, b, c, lo, hi)
        assert rp.status == rc.status
        if rp.status == _pykernels.LP_OPTIMAL:
            assert rc.objective == pytest.approx(rp.objective, abs=1e-9)


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
def test_blocking_matrix_impls_identical():
    from lendmatch import GenerationConfig, generate_instance
    rng = np.random.default_rng(3)
    for seed in range(30):
        inst = generate_instance(GenerationConfig(num_borrowers=3,
                                                  num_lenders=6, seed=seed))
        x = np.zeros((3, 6), dtype=np.int64)
        for l in range(6):
            b = int(rng.integers(-1, 3))
            if b >= 0:
                x[b, l] = 1
        wp = _pykernels.blocking_matrix(inst.capacity, inst.budget,
                                        inst.borrower_utility,
                                        inst.lender_utility, x)
        wc = _kernels.blocking_matrix(inst.capacity, inst.budget,
                                      inst.borrower_utility,
                                      inst.lender_utility, x)
        assert np.array_equal(wp, wc)


def test_backend_selection_reports_name():
    assert backend.backend_name() in ("compiled", "pure-python")
