#!/usr/bin/env node
/** CLI: plot per-lender mean regret curves from trace CSVs.
 *
 * Usage: lendmatch-plot trace.csv [more.csv ...] [--lenders 0,1,2]
 *        [--out regret.png] [--window 1] [--spaghetti]
 */

import { DEFAULT_SPEC, PlotSpec, renderRegretCurves } from "./render";

function parseArgs(argv: string[]): PlotSpec {
  const spec: PlotSpec = { ...DEFAULT_SPEC, csv: [], out: "regret.png" };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      const value = argv[++i];
      if (value === undefined) {
        throw new Error(`missing value for ${arg}`);
      }
      return value;
    };
    switch (arg) {
      case "--lenders":
        spec.lenders = next()
          .split(",")
          .filter((s) => s !== "")
          .map((s) => {
            const n = Number(s);
            if (!Number.isInteger(n) || n < 0) {
              throw new Error(`bad lender id: ${s}`);
            }
            return n;
          });
        break;
      case "--out":
        spec.out = next();
        break;
      case "--window":
        spec.window = Number(next());
        break;
      case "--width":
        spec.width = Number(next());
        break;
      case "--height":
        spec.height = Number(next());
        break;
      case "--spaghetti":
        spec.spaghetti = true;
        break;
      case "--help":
      case "-h":
        console.log(
          "usage: lendmatch-plot trace.csv [more.csv ...] " +
            "[--lenders 0,1,2] [--out regret.png] [--window N] " +
            "[--spaghetti] [--width W] [--height H]",
        );
        process.exit(0);
        break;
      default:
        if (arg.startsWith("-")) {
          throw new Error(`unknown option: ${arg}`);
        }
        spec.csv.push(arg);
    }
  }
  return spec;
}

function main(): void {
  try {
    const spec = parseArgs(process.argv.slice(2));
    const result = renderRegretCurves(spec);
    console.log(`wrote ${result.imagePath} and ${result.seriesPath}`);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}

main();
