"""Acceptance gate: every primary criterion, one pass/fail line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines.
"""

import json
import math
import time

import numpy as np
import pytest

from lendmatch import (
    GenerationConfig,
    MarketInstance,
    ObjectiveWeights,
    RewardModel,
    StepRecord,
    aggregate_runs,
    blocking_pairs,
    count_feasible,
    cumulative_regret,
    enumerate_optimal,
    generate_instance,
    init_state,
    run_simulation,
    solve_matching,
    solve_optimal_combined,
    ucb_index,
    update_on_match,
)
from lendmatch.cli import cli_main

W11 = ObjectiveWeights(1.0, 1.0)

# utility / amount sampling ranges scaled down to enumerable size
SMALL_GEN = dict(capacity_range=(0.5, 4.0), budget_range=(1.0, 3.0))


def _report(name, ok):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}", flush=True)
    assert ok, f"acceptance criterion failed: {name}"


def _hundred_instances():
    for i in range(100):
        n = 4 + i % 3
        yield i, generate_instance(GenerationConfig(
            num_borrowers=2, num_lenders=n, seed=1000 + i, **SMALL_GEN))


def test_oracle_equivalence():
    t0 = time.monotonic()
    ok = True
    for _, inst in _hundred_instances():
        for selector, solve in (
                ("lender_only", lambda s: solve_matching(s, W11)),
                ("combined", lambda s: solve_optimal_combined(s, W11))):
            truth = enumerate_optimal(inst, W11, selector)
            got = solve(inst)
            if truth.status != got.status:
                ok = False
            elif truth.status == "optimal":
                ok = ok and abs(truth.objective - got.objective) <= 1e-9
                ok = ok and np.array_equal(truth.assignment, got.assignment)
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 60.0
    _report(f"oracle-equivalence (100/100, {elapsed:.1f}s)", ok)


def test_stability_property():
    ok = True
    for _, inst in _hundred_instances():
        k, n = inst.num_borrowers, inst.num_lenders
        weights = ObjectiveWeights(1.0, float(k * n))
        truth = enumerate_optimal(inst, weights)
        if truth.status != "optimal" or truth.blocking.any():
            continue  # no zero-blocking covering assignment found
        got = solve_matching(inst, weights)
        ok = ok and got.status == "optimal" and not got.blocking.any()
    _report("stability-property (lambda2 = K*N*lambda1)", ok)


def test_formula_conformance():
    inst = generate_instance(GenerationConfig(num_borrowers=3, num_lenders=6,
                                              seed=0, **SMALL_GEN))
    state = init_state(inst, horizon=1000)
    state.prior[0, 2] = 0.2
    update_on_match(state, 0, 2, 0.1)
    update_on_match(state, 0, 2, 0.3)
    state.step = 8
    expect = 0.2 + math.sqrt(3.0 * math.log(8) / 4.0)
    ok = abs(ucb_index(state, 0, 2) - expect) <= 1e-12

    rng = np.random.default_rng(7)
    state = init_state(inst, horizon=20_000)
    history = [[[] for _ in range(3)] for _ in range(6)]
    for t in range(1, 10_001):
        state.step = t
        l = int(rng.integers(6))
        b = int(rng.integers(3))
        r = float(rng.normal(0.5, 1.0))
        update_on_match(state, l, b, r)
        history[l][b].append(r)
        recomputed = ((state.prior[l, b] + sum(history[l][b]))
                      / (1 + len(history[l][b])))
        if abs(state.empirical_mean[l, b] - recomputed) > 1e-12:
            ok = False
            break
    _report("formula-conformance (worked example + 10^4 updates)", ok)


def _independent_blocking(inst, x):
    """Pair-by-pair evaluation of the stability inequality."""
    k, n = inst.num_borrowers, inst.num_lenders
    c_b, q = inst.capacity, inst.budget
    ub, ul = inst.borrower_utility, inst.lender_utility
    w = np.zeros((k, n), dtype=np.int64)
    for b in range(k):
        for l in range(n):
            lhs = c_b[b] * x[b, l]
            for lp in range(n):
                if ub[b][lp] > ub[b][l]:
                    lhs += c_b[b] * x[b, lp]
            for bp in range(k):
                if ul[l][bp] > ul[l][b]:
                    lhs += q[l] * x[bp, l]
            if lhs < c_b[b]:
                w[b, l] = 1
    return w


def test_blocking_pair_conformance():
    rng = np.random.default_rng(99)
    ok = True
    for trial in range(1000):
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k + 1, 7))
        inst = generate_instance(GenerationConfig(
            num_borrowers=k, num_lenders=n,
            seed=int(rng.integers(1 << 30)), **SMALL_GEN))
        a = rng.integers(-1, k, size=n)
        x = np.zeros((k, n), dtype=np.int64)
        for l in range(n):
            if a[l] >= 0:
                x[a[l], l] = 1
        w, count = blocking_pairs(inst, x)
        ref = _independent_blocking(inst, x)
        if not np.array_equal(w, ref) or count != ref.sum():
            ok = False
            break
    _report("blocking-pair-conformance (1000 pairs, bit-for-bit)", ok)


def _negative_regret_scenario():
    inst = MarketInstance(
        capacity=np.array([1.0, 1.0]),
        budget=np.array([1.5, 1.5]),
        lender_utility=np.array([[0.9, 0.7],
                                 [0.8, 0.6]]),
        borrower_utility=np.array([[0.10, 0.85],
                                   [0.95, 0.20]]),
    )
    opt = solve_optimal_combined(inst, W11)
    assert inst.lender_utility[0, opt.lender_match[0]] == 0.7
    records = [StepRecord(step=t, matched=np.array([0, 1]),
                          reward=np.array([0.9, 0.6]))
               for t in range(1, 11)]
    trace = cumulative_regret(records, opt, inst,
                              mode="expected_lender_utility")
    return trace.values[0, -1] < 0


@pytest.mark.slow
def test_regret_telescoping_and_sign():
    t0 = time.monotonic()
    inst = generate_instance(GenerationConfig(
        num_borrowers=5, num_lenders=15, capacity_range=(1.25, 10.0),
        budget_range=(1.0, 10.0), seed=42))
    runs = [run_simulation(inst, W11, RewardModel("gaussian", 1.0),
                           horizon=2000, seed=100 + r, run_id=r)
            for r in range(20)]

    ok = True
    opt = solve_optimal_combined(inst, W11)
    base = np.array([inst.lender_utility[l, b] if b >= 0 else 0.0
                     for l, b in enumerate(opt.lender_match)])
    for run in runs:
        contrib = np.zeros((15, 2000))
        for i, rec in enumerate(run.records):
            for l in range(15):
                b = rec.matched[l]
                got = inst.lender_utility[l, b] if b >= 0 else 0.0
                contrib[l, i] = base[l] - got
        # trace differences equal per-step contributions exactly
        if not np.array_equal(run.trace.values, np.cumsum(contrib, axis=1)):
            ok = False

    agg = aggregate_runs(runs)
    stabilized = int((np.abs(agg.terminal_slope) < 0.01).sum())
    ok = ok and stabilized >= 1
    ok = ok and _negative_regret_scenario()
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 600.0
    _report(f"regret-telescoping-and-sign ({stabilized}/15 lenders "
            f"stabilized, {elapsed:.0f}s)", ok)


def test_determinism(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("k = 2\nn = 4\nc_min = 0.5\nc_max = 3\nq_min = 1\n"
                   "q_max = 3\nhorizon = 20\nruns = 2\nseed = 5\n")
    ok = True
    for d in ("a", "b"):
        ok = ok and cli_main(["run", "--config", str(cfg),
                              "--out-dir", str(tmp_path / d)]) == 0
    ok = ok and ((tmp_path / "a" / "trace.csv").read_bytes()
                 == (tmp_path / "b" / "trace.csv").read_bytes())
    ok = ok and ((tmp_path / "a" / "summary.json").read_bytes()
                 == (tmp_path / "b" / "summary.json").read_bytes())
    ok = ok and json.loads((tmp_path / "a" / "summary.json").read_text())
    _report("determinism (byte-identical CSV and JSON)", bool(ok))


def test_degenerate_cases():
    single = MarketInstance(capacity=np.array([5.0]),
                            budget=np.array([5.0]),
                            lender_utility=np.array([[0.7]]),
                            borrower_utility=np.array([[0.4]]))
    result = run_simulation(single, W11, RewardModel("deterministic", 0.0),
                            horizon=10, seed=0)
    ok = not result.trace.values.any()

    infeasible = MarketInstance(
        capacity=np.array([3.0, 3.0]),
        budget=np.array([2.0, 2.0, 2.0]),
        lender_utility=np.array([[0.5, 0.6], [0.4, 0.3], [0.8, 0.2]]),
        borrower_utility=np.array([[0.1, 0.2, 0.3], [0.6, 0.5, 0.4]]),
    )
    ok = ok and solve_matching(infeasible, W11).status == "infeasible"
    ok = ok and enumerate_optimal(infeasible, W11).status == "infeasible"
    ok = ok and count_feasible(infeasible) == 0
    _report("degenerate-cases (zero regret + infeasible detection)", ok)
