/** Pure chart geometry: scales, ticks, and polyline segmentation. */

import type { SweepRow } from "./csv.js";

export const WIDTH = 800;
export const HEIGHT = 500;
export const MARGIN = { top: 48, right: 24, bottom: 56, left: 78 };

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  color: string;
  cssClass: string;
  /** Consecutive finite runs; breaks mark diverging values. */
  segments: Point[][];
  /** eta values whose y is infinite (curve truncation points). */
  truncatedAt: number[];
}

export interface ChartLayout {
  xTicks: { value: number; x: number }[];
  yTicks: { value: number; y: number; label: string }[];
  series: Series[];
  logY: boolean;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (raw <= mult * power) return mult * power;
  }
  return 10 * power;
}

export function ticks(min: number, max: number, target = 6): number[] {
  if (max <= min) return [min];
  const step = niceStep(max - min, target);
  const out: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 10000 || abs < 0.001) return value.toExponential(1);
  return String(Number(value.toPrecision(6)));
}

const plotWidth = WIDTH - MARGIN.left - MARGIN.right;
const plotHeight = HEIGHT - MARGIN.top - MARGIN.bottom;

export function layoutChart(rows: SweepRow[], logY: boolean): ChartLayout {
  const etas = rows.map((r) => r.eta);
  const xMin = Math.min(...etas);
  const xMax = Math.max(...etas);
  const xSpan = xMax - xMin || 1;
  const toX = (eta: number) => MARGIN.left + ((eta - xMin) / xSpan) * plotWidth;

  const finite: number[] = [];
  for (const row of rows) {
    for (const v of [row.sim_precision, row.ind_precision]) {
      if (Number.isFinite(v) && (!logY || v > 0)) finite.push(v);
    }
  }
  if (finite.length === 0) {
    throw new Error("no finite values to plot");
  }
  let yMin = Math.min(...finite);
  let yMax = Math.max(...finite);
  if (yMax === yMin) {
    yMax = yMin + 1;
  }
  const transform = logY ? Math.log10 : (v: number) => v;
  const tMin = transform(yMin);
  const tMax = transform(yMax);
  const toY = (v: number) =>
    MARGIN.top + plotHeight - ((transform(v) - tMin) / (tMax - tMin)) * plotHeight;

  const defs: { key: "sim_precision" | "ind_precision"; label: string; color: string; cssClass: string }[] = [
    { key: "sim_precision", label: "simultaneous", color: "#1f6fb2", cssClass: "series-sim" },
    { key: "ind_precision", label: "independent", color: "#d1662c", cssClass: "series-ind" },
  ];
  const series: Series[] = defs.map((def) => {
    const segments: Point[][] = [];
    const truncatedAt: number[] = [];
    let current: Point[] = [];
    for (const row of rows) {
      const v = row[def.key];
      if (Number.isFinite(v) && (!logY || v > 0)) {
        current.push({ x: toX(row.eta), y: toY(v) });
      } else {
        if (Number.isFinite(v) === false) truncatedAt.push(row.eta);
        if (current.length > 0) segments.push(current);
        current = [];
      }
    }
    if (current.length > 0) segments.push(current);
    return { label: def.label, color: def.color, cssClass: def.cssClass, segments, truncatedAt };
  });

  const xTicks = ticks(xMin, xMax).map((value) => ({ value, x: toX(value) }));
  const yTickValues = logY
    ? ticks(tMin, tMax, 5).map((t) => Math.pow(10, t))
    : ticks(yMin, yMax, 6);
  const yTicks = yTickValues
    .filter((v) => transform(v) >= tMin - 1e-9 && transform(v) <= tMax + 1e-9)
    .map((value) => ({ value, y: toY(value), label: formatTick(value) }));
  return { xTicks, yTicks, series, logY };
}
