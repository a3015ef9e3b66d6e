"""Persistence: instance files, per-run trace CSVs, summary JSON.

Instances serialize through JSON with shortest-roundtrip floats, so a
reloaded instance is bit-identical to the original.  Trace CSVs render
reals with 12 significant digits and fixed row order, making outputs
byte-stable for a fixed (config, seed).
"""

from __future__ import annotations

import json

import numpy as np

from .harness import AggregateResult, RunResult, aggregate_stack
from .model import MarketInstance

CSV_HEADER = "run_id,t,lender_id,matched_borrower,reward,cumulative_regret"


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def write_instance(instance: MarketInstance, path) -> None:
    doc = {
        "capacity": instance.capacity.tolist(),
        "budget": instance.budget.tolist(),
        "lender_utility": instance.lender_utility.tolist(),
        "borrower_utility": instance.borrower_utility.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_instance(path) -> MarketInstance:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return MarketInstance(
        capacity=np.asarray(doc["capacity"], dtype=np.float64),
        budget=np.asarray(doc["budget"], dtype=np.float64),
        lender_utility=np.asarray(doc["lender_utility"], dtype=np.float64),
        borrower_utility=np.asarray(doc["borrower_utility"],
                                    dtype=np.float64))


def _trace_rows(result: RunResult):
    n = result.num_lenders
    for i, rec in enumerate(result.records):
        for l in range(n):
            b = rec.matched[l]
            yield (f"{result.run_id},{rec.step},{l},"
                   f"{'' if b < 0 else int(b)},{_fmt(rec.reward[l])},"
                   f"{_fmt(result.trace.values[l, i])}")


def write_trace_csv(result: RunResult, path) -> None:
    """One run; rows ordered by (t, lender_id)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in _trace_rows(result):
            fh.write(row + "\n")


def write_traces_csv(results, path) -> None:
    """All runs concatenated into one streamable file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for result in results:
            for row in _trace_rows(result):
                fh.write(row + "\n")


def read_trace_stack(path) -> np.ndarray:
    """Reconstruct the (runs, lenders, steps) cumulative-regret array
    from a trace CSV."""
    per_run: dict = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            fields = line.rstrip("\n").split(",")
            run_id, t, lender = int(fields[0]), int(fields[1]), int(fields[2])
            per_run.setdefault(run_id, {})[(lender, t)] = float(fields[5])
    if not per_run:
        raise ValueError("empty trace CSV")
    run_ids = sorted(per_run)
    lenders = 1 + max(l for cells in per_run.values() for l, _ in cells)
    steps = max(t for cells in per_run.values() for _, t in cells)
    stack = np.zeros((len(run_ids), lenders, steps))
    for i, rid in enumerate(run_ids):
        for (l, t), val in per_run[rid].items():
            stack[i, l, t - 1] = val
    return stack


def summarize_csv(path) -> AggregateResult:
    return aggregate_stack(read_trace_stack(path))


def write_summary_json(aggregate: AggregateResult, path,
                       config_echo=None, solver_stats=None) -> None:
    """Structured per-lender summary; schema documented in the README."""
    doc = {
        "n_runs": aggregate.n_runs,
        "horizon": aggregate.horizon,
        "config": config_echo or {},
        "solver": solver_stats or {},
        "lenders": [
            {
                "lender_id": l,
                "mean_terminal_regret": float(aggregate.mean[l, -1]),
                "std_terminal_regret": float(aggregate.std[l, -1]),
                "terminal_slope": float(aggregate.terminal_slope[l]),
            }
            for l in range(aggregate.mean.shape[0])
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
