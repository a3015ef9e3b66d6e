"""Compare the compiled and pure-python kernel backends.

Times the two hot kernels (the bounded-variable simplex and the
blocking-pair matrix) on representative LP relaxations, then the full
exact solve on a desk-scale instance through each backend.

Usage: python3 benchmarks/bench_kernels.py [--steps 50]
"""

import argparse
import time

import numpy as np

from lendmatch import _pykernels
from lendmatch import backend
from lendmatch.bandit import RewardModel
from lendmatch.harness import run_simulation
from lendmatch.model import GenerationConfig, generate_instance
from lendmatch.solver import ObjectiveWeights, _build_lp, solve_matching

try:
    from lendmatch import _kernels
except ImportError:
    _kernels = None


def _lp_problem(k, n, seed):
    inst = generate_instance(GenerationConfig(
        num_borrowers=k, num_lenders=n, capacity_range=(1.25, 10.0),
        budget_range=(1.0, 10.0), seed=seed))
    A, rhs, c = _build_lp(inst, inst.lender_utility, ObjectiveWeights(1, 1))
    nvar = A.shape[1]
    return inst, A, rhs, c, np.zeros(nvar), np.ones(nvar)


def bench_lp(impl, problems, repeats=20):
    start = time.perf_counter()
    for _, A, rhs, c, lo, hi in problems:
        for _ in range(repeats):
            res = impl.solve_lp(A, rhs, c, lo, hi, 1e-9, 0, None)
            assert res.status == impl.LP_OPTIMAL
    return time.perf_counter() - start


def bench_blocking(impl, problems, repeats=200):
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    for inst, *_ in problems:
        k, n = inst.num_borrowers, inst.num_lenders
        a = rng.integers(-1, k, size=n)
        x = np.zeros((k, n), dtype=np.int64)
        for l in range(n):
            if a[l] >= 0:
                x[a[l], l] = 1
        for _ in range(repeats):
            impl.blocking_matrix(inst.capacity, inst.budget,
                                 inst.borrower_utility,
                                 inst.lender_utility, x)
    return time.perf_counter() - start


def bench_end_to_end(impl, steps):
    inst = generate_instance(GenerationConfig(
        num_borrowers=5, num_lenders=15, capacity_range=(1.25, 10.0),
        budget_range=(1.0, 10.0), seed=42))
    saved = backend._impl
    backend._impl = impl
    try:
        start = time.perf_counter()
        run_simulation(inst, ObjectiveWeights(1, 1),
                       RewardModel("gaussian", 1.0), horizon=steps, seed=0)
        return time.perf_counter() - start
    finally:
        backend._impl = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=50,
                        help="simulation steps for the end-to-end timing")
    args = parser.parse_args()

    impls = [("pure-python", _pykernels)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))
    else:
        print("compiled extension not importable; pure-python only")

    problems = [_lp_problem(2, 6, 1), _lp_problem(3, 9, 2),
                _lp_problem(5, 15, 3)]

    print(f"{'benchmark':<28}" + "".join(f"{name:>14}" for name, _ in impls))
    rows = [
        ("simplex (3 LPs x 20)", lambda im: bench_lp(im, problems)),
        ("blocking (3 x 200)", lambda im: bench_blocking(im, problems)),
        (f"simulation ({args.steps} steps)",
         lambda im: bench_end_to_end(im, args.steps)),
    ]
    results = {}
    for label, fn in rows:
        times = [fn(impl) for _, impl in impls]
        results[label] = times
        print(f"{label:<28}"
              + "".join(f"{t * 1000:>12.1f}ms" for t in times))
    if len(impls) == 2:
        print(f"{'speedup (pure/compiled)':<28}"
              + "".join(f"{results[label][0] / results[label][1]:>13.2f}x"
                        for label in [r[0] for r in rows]))


if __name__ == "__main__":
    main()
