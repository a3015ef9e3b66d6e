/** Line-chart drawing onto a Raster surface. */

import { GLYPH_H, GLYPH_W, glyphFor, textWidth } from "./font";
import { Raster } from "./png";

export type RGB = readonly [number, number, number];

export const PALETTE: RGB[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

const BLACK: RGB = [0, 0, 0];
const GREY: RGB = [210, 210, 210];

export function drawText(
  raster: Raster,
  x: number,
  y: number,
  text: string,
  color: RGB = BLACK,
): void {
  let cx = x;
  for (const ch of text) {
    const glyph = glyphFor(ch);
    for (let gy = 0; gy < GLYPH_H; gy++) {
      for (let gx = 0; gx < GLYPH_W; gx++) {
        if ((glyph[gy] >> (GLYPH_W - 1 - gx)) & 1) {
          raster.set(cx + gx, y + gy, color);
        }
      }
    }
    cx += GLYPH_W + 1;
  }
}

export function drawLine(
  raster: Raster,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  color: RGB,
): void {
  // Bresenham
  let [x, y] = [Math.round(x0), Math.round(y0)];
  const [ex, ey] = [Math.round(x1), Math.round(y1)];
  const dx = Math.abs(ex - x);
  const dy = -Math.abs(ey - y);
  const sx = x < ex ? 1 : -1;
  const sy = y < ey ? 1 : -1;
  let err = dx + dy;
  for (;;) {
    raster.set(x, y, color);
    if (x === ex && y === ey) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 10000 || magnitude < 0.01) {
    return value.toExponential(1).replace("e", "E");
  }
  const text = value.toFixed(magnitude >= 100 ? 0 : magnitude >= 1 ? 1 : 2);
  return text.replace(/\.0+$/, "");
}

export interface Series {
  label: string;
  values: number[];
  color: RGB;
}

export interface ChartOptions {
  width: number;
  height: number;
  xLabel: string;
  yLabel: string;
  /** faint per-run curves drawn underneath the mean lines */
  background?: Series[];
}

/** Render series (indexed 1..T on x) with axes, ticks, and a legend. */
export function renderChart(series: Series[], opts: ChartOptions): Raster {
  const raster = new Raster(opts.width, opts.height);
  const margin = { left: 64, right: 16, top: 14, bottom: 34 };
  const plotW = opts.width - margin.left - margin.right;
  const plotH = opts.height - margin.top - margin.bottom;

  const all = series.concat(opts.background ?? []);
  const horizon = Math.max(1, ...all.map((s) => s.values.length));
  let lo = Math.min(0, ...all.flatMap((s) => s.values));
  let hi = Math.max(0, ...all.flatMap((s) => s.values));
  if (hi === lo) hi = lo + 1;
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const px = (t: number) =>
    margin.left + ((t - 1) / Math.max(1, horizon - 1)) * plotW;
  const py = (v: number) => margin.top + ((hi - v) / (hi - lo)) * plotH;

  // gridline + ticks
  const yTicks = 5;
  for (let i = 0; i <= yTicks; i++) {
    const v = lo + ((hi - lo) * i) / yTicks;
    const y = Math.round(py(v));
    drawLine(raster, margin.left, y, margin.left + plotW, y, GREY);
    const label = formatTick(v);
    drawText(raster, margin.left - textWidth(label) - 6, y - 3, label);
  }
  const xTicks = 5;
  for (let i = 0; i <= xTicks; i++) {
    const t = 1 + ((horizon - 1) * i) / xTicks;
    const x = Math.round(px(t));
    drawLine(raster, x, margin.top, x, margin.top + plotH, GREY);
    const label = formatTick(Math.round(t));
    drawText(
      raster,
      x - Math.floor(textWidth(label) / 2),
      margin.top + plotH + 6,
      label,
    );
  }

  // axes
  drawLine(
    raster,
    margin.left,
    margin.top,
    margin.left,
    margin.top + plotH,
    BLACK,
  );
  drawLine(
    raster,
    margin.left,
    margin.top + plotH,
    margin.left + plotW,
    margin.top + plotH,
    BLACK,
  );
  drawText(
    raster,
    margin.left + Math.floor(plotW / 2) - Math.floor(textWidth(opts.xLabel) / 2),
    opts.height - GLYPH_H - 2,
    opts.xLabel,
  );
  drawText(raster, 4, 2, opts.yLabel);

  const plot = (s: Series) => {
    for (let t = 1; t < s.values.length; t++) {
      drawLine(
        raster,
        px(t),
        py(s.values[t - 1]),
        px(t + 1),
        py(s.values[t]),
        s.color,
      );
    }
    if (s.values.length === 1) {
      raster.set(Math.round(px(1)), Math.round(py(s.values[0])), s.color);
    }
  };
  for (const s of opts.background ?? []) plot(s);
  for (const s of series) plot(s);

  // legend: swatch + label per series, top-right corner of the plot
  let ly = margin.top + 4;
  for (const s of series) {
    const lx = margin.left + plotW - textWidth(s.label) - 24;
    drawLine(raster, lx, ly + 3, lx + 12, ly + 3, s.color);
    drawLine(raster, lx, ly + 4, lx + 12, ly + 4, s.color);
    drawText(raster, lx + 16, ly, s.label);
    ly += GLYPH_H + 3;
  }
  return raster;
}
