"""Command-line entry point.

Subcommands: ``generate`` (write an instance file), ``run`` (execute an
experiment, writing trace.csv and summary.json), ``oracle-check``
(compare the exact solver against brute-force enumeration on sampled
small instances), ``summarize`` (aggregate an existing trace CSV).

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import multiprocessing
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, load_config
from .errors import LendmatchError
from .harness import aggregate_runs, run_simulation
from .model import GenerationConfig, generate_instance
from .oracle import enumerate_optimal
from .solver import ObjectiveWeights, SolverOptions, solve_matching, \
    solve_optimal_combined


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lendmatch",
        description="Borrower-lender matching market simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a random instance file")
    p_gen.add_argument("--config", help="experiment config file")
    p_gen.add_argument("--seed", type=int, help="override the config seed")
    p_gen.add_argument("--out", default="instance.json")

    p_run = sub.add_parser("run", help="run the experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--workers", type=int, default=1,
                       help="worker processes for the run loop")
    p_run.add_argument("--out-dir", help="override the config out_dir")

    p_orc = sub.add_parser("oracle-check",
                           help="solver vs enumeration on random instances")
    p_orc.add_argument("--k", type=int, default=2)
    p_orc.add_argument("--n", type=int, default=4)
    p_orc.add_argument("--trials", type=int, default=100)
    p_orc.add_argument("--seed", type=int, default=0)

    p_sum = sub.add_parser("summarize", help="aggregate an existing CSV")
    p_sum.add_argument("--csv", required=True)
    p_sum.add_argument("--out", default="summary.json")
    return parser


def _load_or_default(path):
    return load_config(path) if path else ExperimentConfig()


def _cmd_generate(args):
    config = _load_or_default(args.config)
    gen = config.generation
    if args.seed is not None:
        gen.seed = args.seed
    instance = generate_instance(gen)
    io.write_instance(instance, args.out)
    print(f"wrote {args.out}")
    return 0


def _run_one(payload):
    config_values, run_id = payload
    config = ExperimentConfig(values=config_values)
    gen = config.generation
    if config["resample_instance"]:
        gen.seed = config["seed"] + run_id
    instance = generate_instance(gen)
    return run_simulation(instance, config.weights, config.reward,
                          config["horizon"], options=config.solver,
                          seed=config["seed"] + run_id,
                          regret_mode=config["regret_mode"], run_id=run_id)


def _cmd_run(args):
    config = load_config(args.config)
    out_dir = Path(args.out_dir or config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    payloads = [(config.values, i) for i in range(config["runs"])]
    if args.workers > 1:
        with multiprocessing.Pool(args.workers) as pool:
            results = pool.map(_run_one, payloads)
    else:
        results = [_run_one(p) for p in payloads]

    io.write_traces_csv(results, out_dir / "trace.csv")
    aggregate = aggregate_runs(results)
    stats = {
        "nodes_total": int(sum(r.solver_stats["nodes_total"]
                               for r in results)),
        "heuristic_fallbacks": int(sum(r.solver_stats["heuristic_fallbacks"]
                                       for r in results)),
    }
    io.write_summary_json(aggregate, out_dir / "summary.json",
                          config_echo=config.values, solver_stats=stats)
    print(f"wrote {out_dir / 'trace.csv'} and {out_dir / 'summary.json'}")
    return 0


def _matchings_agree(a, b):
    if a.status != b.status:
        return False
    if a.status == "infeasible":
        return True
    return (abs(a.objective - b.objective) <= 1e-9
            and np.array_equal(a.assignment, b.assignment))


def _cmd_oracle_check(args):
    weights = ObjectiveWeights(1.0, 1.0)
    options = SolverOptions(mode="exact")
    passes = 0
    for trial in range(args.trials):
        gen = GenerationConfig(num_borrowers=args.k, num_lenders=args.n,
                               capacity_range=(0.5, 4.0),
                               budget_range=(1.0, 3.0),
                               seed=args.seed + trial)
        instance = generate_instance(gen)
        exact = solve_matching(instance, weights, options=options)
        truth = enumerate_optimal(instance, weights, "lender_only")
        combined = solve_optimal_combined(instance, weights, options)
        truth_c = enumerate_optimal(instance, weights, "combined")
        if _matchings_agree(exact, truth) and _matchings_agree(combined,
                                                               truth_c):
            passes += 1
    print(f"{passes}/{args.trials} matched oracle")
    return 0 if passes == args.trials else 2


def _cmd_summarize(args):
    aggregate = io.summarize_csv(args.csv)
    io.write_summary_json(aggregate, args.out)
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "oracle-check": _cmd_oracle_check,
    "summarize": _cmd_summarize,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args)
    except LendmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
