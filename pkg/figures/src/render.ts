/** File-level rendering entry point shared by the CLI and the tests. */

import { readFileSync, writeFileSync } from "node:fs";

import { parseSweepCsv } from "./csv.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";

export interface FigureSpec {
  inputCsv: string;
  output: string;
  format: "png" | "svg";
  title?: string;
  yLabel?: string;
  logY?: boolean;
}

export function render(spec: FigureSpec): void {
  const text = readFileSync(spec.inputCsv, "utf-8");
  const rows = parseSweepCsv(text);
  const options = {
    title: spec.title ?? "simultaneous vs independent estimation",
    yLabel: spec.yLabel ?? "total uncertainty",
    logY: spec.logY ?? false,
  };
  if (spec.format === "svg") {
    writeFileSync(spec.output, renderSvg(rows, options), "utf-8");
  } else {
    writeFileSync(spec.output, renderPng(rows, options));
  }
}
