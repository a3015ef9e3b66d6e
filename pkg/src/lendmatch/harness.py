"""End-to-end simulation loop and regret accounting.

Each step solves the matching program with the lenders' current
optimistic indices (borrower utilities stay fixed), feeds sampled
rewards back into the bandit state, and recomputes the indices.  Regret
is accounted per lender against the hindsight matching that maximises
the summed borrower+lender utilities on the true instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bandit
from .errors import InfeasibleMatching, InvalidHorizon, ModeUnknown, \
    NodeLimitExceeded, ShapeMismatch
from .model import MarketInstance
from .solver import Matching, ObjectiveWeights, SolverOptions, \
    _solve_heuristic, solve_matching, solve_optimal_combined

REGRET_MODES = ("expected_lender_utility", "realized_reward",
                "expected_borrower_utility")


@dataclass
class StepRecord:
    step: int
    matched: np.ndarray   # (N,) borrower index or -1
    reward: np.ndarray    # (N,) realized reward, 0 when unmatched


@dataclass
class RegretTrace:
    values: np.ndarray    # (N, T) cumulative regret
    mode: str


@dataclass
class RunResult:
    run_id: int
    seed: int
    instance_fingerprint: str
    records: list
    trace: RegretTrace
    final_matching: Matching
    solver_stats: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.records)

    @property
    def num_lenders(self) -> int:
        return self.records[0].matched.shape[0]


@dataclass
class AggregateResult:
    mean: np.ndarray            # (N, T) mean cumulative regret
    std: np.ndarray             # (N, T)
    terminal_slope: np.ndarray  # (N,) slope over the last quarter of mean
    n_runs: int
    horizon: int


def _baseline_per_lender(instance, optimal_matching):
    """u_l at the lender's hindsight borrower; 0 when unmatched there."""
    base = np.zeros(instance.num_lenders)
    for l, b in enumerate(optimal_matching.lender_match):
        if b >= 0:
            base[l] = instance.lender_utility[l, b]
    return base


def cumulative_regret(records, optimal_matching: Matching,
                      instance: MarketInstance,
                      mode: str = "expected_lender_utility") -> RegretTrace:
    """Per-lender cumulative regret over the recorded steps.

    The default mode charges ``u_l(b_opt) - u_l(b_alg(t))`` per step
    (the reward expectation replaces the sample); ``realized_reward``
    subtracts the sampled reward instead, and
    ``expected_borrower_utility`` subtracts ``u_{b_alg}(l)``, the mean
    of the reward distribution.  Unmatched steps contribute the full
    baseline.
    """
    if mode not in REGRET_MODES:
        raise ModeUnknown(f"regret mode {mode!r} not in {REGRET_MODES}")
    n = instance.num_lenders
    t_max = len(records)
    base = _baseline_per_lender(instance, optimal_matching)
    contrib = np.zeros((n, t_max))
    for i, rec in enumerate(records):
        for l in range(n):
            b = rec.matched[l]
            if b < 0:
                got = 0.0
            elif mode == "expected_lender_utility":
                got = instance.lender_utility[l, b]
            elif mode == "realized_reward":
                got = rec.reward[l]
            else:
                got = instance.borrower_utility[b, l]
            contrib[l, i] = base[l] - got
    return RegretTrace(values=np.cumsum(contrib, axis=1), mode=mode)


def run_simulation(instance: MarketInstance, weights: ObjectiveWeights,
                   reward_model: bandit.RewardModel, horizon: int,
                   options: SolverOptions | None = None, seed: int = 0,
                   regret_mode: str = "expected_lender_utility",
                   run_id: int = 0) -> RunResult:
    """Play the bandit matching loop for ``horizon`` steps.

    Exact-mode node-limit overruns fall back to the heuristic solver for
    that step (counted in ``solver_stats``); a step with no covering
    assignment aborts the run.
    """
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    options = options or SolverOptions()
    rng = np.random.default_rng(seed)
    n = instance.num_lenders

    try:
        opt = solve_optimal_combined(instance, weights, options)
    except NodeLimitExceeded:
        combined = instance.lender_utility + instance.borrower_utility.T
        opt = _solve_heuristic(instance, combined, weights, options)
    if opt.status == "infeasible":
        raise InfeasibleMatching(0, certificate=opt.certificate)

    state = bandit.init_state(instance, horizon)
    records = []
    stats = {"nodes_total": 0, "heuristic_fallbacks": 0,
             "status_counts": {}}
    prev_assignment = None
    for t in range(1, horizon + 1):
        cu = bandit.current_utilities(state)
        try:
            matching = solve_matching(instance, weights,
                                      utility_override=cu, options=options,
                                      warm_start=prev_assignment)
        except NodeLimitExceeded:
            matching = _solve_heuristic(instance, cu, weights, options,
                                        lender_pref=cu)
            stats["heuristic_fallbacks"] += 1
        if matching.status == "infeasible":
            raise InfeasibleMatching(t, certificate=matching.certificate)
        prev_assignment = matching.assignment
        stats["nodes_total"] += matching.nodes
        stats["status_counts"][matching.status] = \
            stats["status_counts"].get(matching.status, 0) + 1

        state.step = t
        rewards = np.zeros(n)
        matched = matching.lender_match.copy()
        for l in range(n):
            b = matched[l]
            if b < 0:
                continue
            r = bandit.sample_reward(reward_model,
                                     instance.borrower_utility[b, l], rng)
            rewards[l] = r
            bandit.update_on_match(state, l, int(b), r)
        records.append(StepRecord(step=t, matched=matched, reward=rewards))

    trace = cumulative_regret(records, opt, instance, regret_mode)
    return RunResult(run_id=run_id, seed=seed,
                     instance_fingerprint=instance.fingerprint(),
                     records=records, trace=trace,
                     final_matching=matching, solver_stats=stats)


def aggregate_runs(results) -> AggregateResult:
    """Mean/std of cumulative regret across runs plus terminal slopes."""
    if not results:
        raise ShapeMismatch("no runs to aggregate")
    n = results[0].num_lenders
    t_max = results[0].horizon
    for r in results:
        if r.num_lenders != n or r.horizon != t_max:
            raise ShapeMismatch(
                f"run {r.run_id}: shape ({r.num_lenders}, {r.horizon}) "
                f"!= ({n}, {t_max})")
    stack = np.stack([r.trace.values for r in results])   # (R, N, T)
    return aggregate_stack(stack)


def aggregate_stack(stack: np.ndarray) -> AggregateResult:
    """Aggregate an (runs, lenders, steps) cumulative-regret array."""
    _, n, t_max = stack.shape
    mean = stack.mean(axis=0)
    std = stack.std(axis=0)
    q = max(t_max - t_max // 4, 0)
    ts = np.arange(q, t_max, dtype=np.float64)
    slope = np.zeros(n)
    if ts.size >= 2:
        for l in range(n):
            slope[l] = np.polyfit(ts, mean[l, q:], 1)[0]
    return AggregateResult(mean=mean, std=std, terminal_slope=slope,
                           n_runs=stack.shape[0], horizon=t_max)
