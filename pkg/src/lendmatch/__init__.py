"""Borrower-lender matching market simulator.

Exact integer-program matching with blocking-pair penalties, a UCB
bandit loop through which lenders learn borrower-side preferences, and a
regret-evaluation harness against the combined-utility optimum.
"""

from .backend import backend_name
from .bandit import (
    BanditState,
    RewardModel,
    current_utilities,
    init_state,
    sample_reward,
    ucb_index,
    update_on_match,
)
from .harness import (
    AggregateResult,
    RegretTrace,
    RunResult,
    StepRecord,
    aggregate_runs,
    cumulative_regret,
    run_simulation,
)
from .model import (
    GenerationConfig,
    MarketInstance,
    PreferenceLists,
    ValidationReport,
    generate_instance,
    preferences_from_utilities,
    validate_instance,
)
from .oracle import count_feasible, enumerate_optimal
from .solver import (
    Matching,
    ObjectiveWeights,
    SolverOptions,
    deferred_acceptance_warm_start,
    solve_matching,
    solve_optimal_combined,
)
from .stability import blocking_pairs, objective_value

__version__ = "0.1.0"

__all__ = [
    "AggregateResult", "BanditState", "GenerationConfig", "MarketInstance",
    "Matching", "ObjectiveWeights", "PreferenceLists", "RegretTrace",
    "RewardModel", "RunResult", "SolverOptions", "StepRecord",
    "ValidationReport", "aggregate_runs", "backend_name", "blocking_pairs",
    "count_feasible", "cumulative_regret", "current_utilities",
    "deferred_acceptance_warm_start", "enumerate_optimal",
    "generate_instance", "init_state", "objective_value",
    "preferences_from_utilities", "run_simulation", "sample_reward",
    "solve_matching", "solve_optimal_combined", "ucb_index",
    "update_on_match", "validate_instance",
]
