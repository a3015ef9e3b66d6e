/** Render per-lender mean cumulative-regret curves from a trace CSV.
 *
 * Writes a PNG and, alongside it, a `<image>.series.json` export of the
 * exact numeric series plotted, so the values can be checked against
 * the simulator's own aggregation.
 */

import * as fs from "fs";
import * as path from "path";

import { meanSeries, smooth } from "./aggregate";
import { PALETTE, Series, renderChart } from "./chart";
import { UnknownLender, readTrace } from "./csv";

export interface PlotSpec {
  /** input trace CSV path(s); several files are treated as extra runs */
  csv: string[];
  /** lender ids to plot; empty means every lender in the CSV */
  lenders: number[];
  out: string;
  /** trailing moving-average window; 1 = raw series */
  window: number;
  /** also draw faint per-run curves */
  spaghetti: boolean;
  width: number;
  height: number;
}

export const DEFAULT_SPEC: Omit<PlotSpec, "csv" | "out"> = {
  lenders: [],
  window: 1,
  spaghetti: false,
  width: 720,
  height: 440,
};

export interface RenderResult {
  /** lender id -> plotted (smoothed) mean series */
  series: Record<number, number[]>;
  imagePath: string;
  seriesPath: string;
}

function mergeTraces(paths: string[]) {
  const traces = paths.map(readTrace);
  const base = traces[0];
  for (const extra of traces.slice(1)) {
    if (
      extra.numLenders !== base.numLenders ||
      extra.horizon !== base.horizon
    ) {
      throw new Error(
        "trace CSVs disagree on lender count or horizon and cannot be merged",
      );
    }
    base.regret.push(...extra.regret);
  }
  return base;
}

export function renderRegretCurves(spec: PlotSpec): RenderResult {
  if (spec.csv.length === 0) {
    throw new Error("at least one trace CSV is required");
  }
  const trace = mergeTraces(spec.csv);
  const lenders =
    spec.lenders.length > 0
      ? spec.lenders
      : Array.from({ length: trace.numLenders }, (_, l) => l);
  for (const lender of lenders) {
    if (lender < 0 || lender >= trace.numLenders) {
      throw new UnknownLender(lender);
    }
  }

  const exported: Record<number, number[]> = {};
  const series: Series[] = lenders.map((lender, i) => {
    const mean = smooth(meanSeries(trace, lender), spec.window);
    exported[lender] = mean;
    return {
      label: `LENDER ${lender}`,
      values: mean,
      color: PALETTE[i % PALETTE.length],
    };
  });

  const background: Series[] = [];
  if (spec.spaghetti) {
    for (const run of trace.regret) {
      for (const lender of lenders) {
        background.push({
          label: "",
          values: smooth(run[lender], spec.window),
          color: [225, 225, 235],
        });
      }
    }
  }

  const raster = renderChart(series, {
    width: spec.width,
    height: spec.height,
    xLabel: "T",
    yLabel: "MEAN CUMULATIVE REGRET",
    background,
  });
  fs.mkdirSync(path.dirname(path.resolve(spec.out)), { recursive: true });
  fs.writeFileSync(spec.out, raster.encode());

  const seriesPath = spec.out.replace(/(\.[a-z]+)?$/i, ".series.json");
  fs.writeFileSync(
    seriesPath,
    JSON.stringify(
      {
        window: spec.window,
        runs: trace.regret.length,
        horizon: trace.horizon,
        lenders: exported,
      },
      null,
      2,
    ) + "\n",
  );
  return { series: exported, imagePath: spec.out, seriesPath };
}
