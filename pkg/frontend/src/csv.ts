/** Trace-CSV parsing for the regret plotter.
 *
 * The input schema is the simulator's trace file:
 * `run_id,t,lender_id,matched_borrower,reward,cumulative_regret`
 * with one row per (run, step, lender) and 1-based steps.
 */

import * as fs from "fs";

export class MissingColumn extends Error {
  constructor(column: string) {
    super(`trace CSV is missing required column: ${column}`);
    this.name = "MissingColumn";
  }
}

export class UnknownLender extends Error {
  constructor(lender: number) {
    super(`lender id ${lender} does not appear in the trace CSV`);
    this.name = "UnknownLender";
  }
}

export interface TraceData {
  /** regret[runIndex][lenderId][t - 1] = cumulative regret */
  regret: number[][][];
  runIds: number[];
  numLenders: number;
  horizon: number;
}

const REQUIRED = ["run_id", "t", "lender_id", "cumulative_regret"];

/** Parse one trace CSV (strict header check, streaming-friendly split). */
export function readTrace(path: string): TraceData {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split("\n");
  const header = (lines[0] ?? "").trim().split(",");
  const index: Record<string, number> = {};
  header.forEach((name, i) => {
    index[name] = i;
  });
  for (const column of REQUIRED) {
    if (!(column in index)) {
      throw new MissingColumn(column);
    }
  }
  const perRun = new Map<number, Map<number, Map<number, number>>>();
  let numLenders = 0;
  let horizon = 0;
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const fields = line.split(",");
    const runId = Number(fields[index.run_id]);
    const t = Number(fields[index.t]);
    const lender = Number(fields[index.lender_id]);
    const value = Number(fields[index.cumulative_regret]);
    if (!perRun.has(runId)) perRun.set(runId, new Map());
    const byLender = perRun.get(runId)!;
    if (!byLender.has(lender)) byLender.set(lender, new Map());
    byLender.get(lender)!.set(t, value);
    if (lender + 1 > numLenders) numLenders = lender + 1;
    if (t > horizon) horizon = t;
  }
  if (perRun.size === 0) {
    throw new Error(`trace CSV has no data rows: ${path}`);
  }
  const runIds = [...perRun.keys()].sort((a, b) => a - b);
  const regret = runIds.map((runId) => {
    const byLender = perRun.get(runId)!;
    return Array.from({ length: numLenders }, (_, l) => {
      const series = byLender.get(l);
      return Array.from({ length: horizon }, (_, i) =>
        series?.get(i + 1) ?? 0,
      );
    });
  });
  return { regret, runIds, numLenders, horizon };
}
