import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { meanSeries, smooth } from "../src/aggregate";
import { MissingColumn, UnknownLender, readTrace } from "../src/csv";
import { renderRegretCurves } from "../src/render";

const FIXTURES = path.join(__dirname, "fixtures");
const TRACE = path.join(FIXTURES, "trace.csv");

function tmpOut(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "lmplot-"));
  return path.join(dir, name);
}

describe("csv parsing", () => {
  it("reads the fixture trace into a (runs, lenders, steps) stack", () => {
    const trace = readTrace(TRACE);
    expect(trace.regret.length).toBe(3);
    expect(trace.numLenders).toBe(4);
    expect(trace.horizon).toBe(40);
  });

  it("rejects a CSV without the regret column", () => {
    const bad = tmpOut("bad.csv");
    fs.writeFileSync(bad, "run_id,t,lender_id,reward\n0,1,0,0.5\n");
    expect(() => readTrace(bad)).toThrow(MissingColumn);
  });

  it("rejects unknown lender ids", () => {
    const trace = readTrace(TRACE);
    expect(() => meanSeries(trace, 99)).toThrow(UnknownLender);
  });
});

describe("aggregation", () => {
  it("matches the simulator's aggregate means to 1e-9", () => {
    const reference = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "means.json"), "utf-8"),
    ) as { mean: number[][]; n_runs: number; horizon: number };
    const trace = readTrace(TRACE);
    expect(trace.regret.length).toBe(reference.n_runs);
    for (let l = 0; l < trace.numLenders; l++) {
      const mean = meanSeries(trace, l);
      for (let t = 0; t < trace.horizon; t++) {
        expect(Math.abs(mean[t] - reference.mean[l][t])).toBeLessThanOrEqual(
          1e-9,
        );
      }
    }
  });

  it("matches the summary JSON terminal means", () => {
    const summary = JSON.parse(
      fs.readFileSync(path.join(FIXTURES, "summary.json"), "utf-8"),
    ) as { lenders: { lender_id: number; mean_terminal_regret: number }[] };
    const trace = readTrace(TRACE);
    for (const entry of summary.lenders) {
      const mean = meanSeries(trace, entry.lender_id);
      expect(
        Math.abs(mean[trace.horizon - 1] - entry.mean_terminal_regret),
      ).toBeLessThanOrEqual(1e-9);
    }
  });

  it("window 1 smoothing is the identity", () => {
    const series = [1, -2, 3.5, 0];
    expect(smooth(series, 1)).toEqual(series);
  });

  it("trailing moving average", () => {
    expect(smooth([1, 2, 3, 4], 2)).toEqual([1, 1.5, 2.5, 3.5]);
  });
});

describe("rendering", () => {
  it("writes a PNG and an exact numeric series export", () => {
    const out = tmpOut("regret.png");
    const result = renderRegretCurves({
      csv: [TRACE],
      lenders: [],
      out,
      window: 1,
      spaghetti: false,
      width: 480,
      height: 320,
    });
    const png = fs.readFileSync(out);
    expect([...png.subarray(0, 8)]).toEqual([
      0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a,
    ]);
    const exported = JSON.parse(fs.readFileSync(result.seriesPath, "utf-8"));
    const trace = readTrace(TRACE);
    for (let l = 0; l < trace.numLenders; l++) {
      const mean = meanSeries(trace, l);
      for (let t = 0; t < trace.horizon; t++) {
        expect(
          Math.abs(exported.lenders[l][t] - mean[t]),
        ).toBeLessThanOrEqual(1e-9);
      }
    }
  });

  it("renders a flat zero line for a constant-zero single-lender CSV", () => {
    const csv = tmpOut("zero.csv");
    const rows = ["run_id,t,lender_id,matched_borrower,reward,cumulative_regret"];
    for (let t = 1; t <= 10; t++) {
      rows.push(`0,${t},0,0,0.5,0`);
    }
    fs.writeFileSync(csv, rows.join("\n") + "\n");
    const out = tmpOut("zero.png");
    const result = renderRegretCurves({
      csv: [csv],
      lenders: [0],
      out,
      window: 1,
      spaghetti: false,
      width: 320,
      height: 240,
    });
    expect(result.series[0]).toEqual(new Array(10).fill(0));
    expect(fs.existsSync(out)).toBe(true);
  });

  it("rejects a request for a lender absent from the CSV", () => {
    expect(() =>
      renderRegretCurves({
        csv: [TRACE],
        lenders: [12],
        out: tmpOut("nope.png"),
        window: 1,
        spaghetti: false,
        width: 320,
        height: 240,
      }),
    ).toThrow(UnknownLender);
  });

  // desk-scale consistency: point LENDMATCH_DESK_CSV at a full
  // experiment trace to run the same 1e-9 check at scale
  const deskCsv = process.env.LENDMATCH_DESK_CSV;
  it.skipIf(!deskCsv || !fs.existsSync(deskCsv))(
    "desk-scale series equals aggregate means to 1e-9",
    () => {
      const out = tmpOut("desk.png");
      const result = renderRegretCurves({
        csv: [deskCsv!],
        lenders: [],
        out,
        window: 1,
        spaghetti: false,
        width: 720,
        height: 440,
      });
      const trace = readTrace(deskCsv!);
      for (let l = 0; l < trace.numLenders; l++) {
        const mean = meanSeries(trace, l);
        for (let t = 0; t < trace.horizon; t++) {
          expect(
            Math.abs(result.series[l][t] - mean[t]),
          ).toBeLessThanOrEqual(1e-9);
        }
      }
    },
  );
});
