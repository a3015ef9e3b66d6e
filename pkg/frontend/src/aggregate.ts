/** Mean-across-runs regret series and optional smoothing. */

import { TraceData, UnknownLender } from "./csv";

/** Per-t mean of cumulative regret across runs for one lender. */
export function meanSeries(trace: TraceData, lender: number): number[] {
  if (lender < 0 || lender >= trace.numLenders) {
    throw new UnknownLender(lender);
  }
  const out = new Array<number>(trace.horizon).fill(0);
  for (const run of trace.regret) {
    const series = run[lender];
    for (let t = 0; t < trace.horizon; t++) {
      out[t] += series[t];
    }
  }
  const n = trace.regret.length;
  for (let t = 0; t < trace.horizon; t++) {
    out[t] /= n;
  }
  return out;
}

/** Trailing moving average; window 1 is the identity. */
export function smooth(series: number[], window: number): number[] {
  if (!Number.isInteger(window) || window < 1) {
    throw new Error(`smoothing window must be an integer >= 1: ${window}`);
  }
  if (window === 1) return series.slice();
  const out = new Array<number>(series.length);
  let acc = 0;
  for (let t = 0; t < series.length; t++) {
    acc += series[t];
    if (t >= window) acc -= series[t - window];
    out[t] = acc / Math.min(t + 1, window);
  }
  return out;
}
