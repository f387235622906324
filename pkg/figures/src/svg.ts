/** Deterministic SVG assembly with an embedded machine-readable data echo. */

import { HEIGHT, MARGIN, WIDTH, layoutChart } from "./chart.js";
import type { SweepRow } from "./csv.js";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function fmt(value: number): string {
  return value.toFixed(2);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Infinities survive the round trip as the strings "inf"/"-inf". */
export function dataEcho(rows: SweepRow[]): string {
  const echo = rows.map((row) => ({
    eta: row.eta,
    sim_precision: Number.isFinite(row.sim_precision)
      ? row.sim_precision
      : row.sim_precision > 0
        ? "inf"
        : "-inf",
    ind_precision: Number.isFinite(row.ind_precision)
      ? row.ind_precision
      : row.ind_precision > 0
        ? "inf"
        : "-inf",
  }));
  return JSON.stringify({ rows: echo });
}

export function renderSvg(
  rows: SweepRow[],
  options: { title: string; yLabel: string; logY: boolean },
): string {
  const chart = layoutChart(rows, options.logY);
  const plotBottom = HEIGHT - MARGIN.bottom;
  const plotRight = WIDTH - MARGIN.right;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<metadata id="data-echo">${escapeXml(dataEcho(rows))}</metadata>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="26" text-anchor="middle" font-size="17" ${FONT}>${escapeXml(options.title)}</text>`,
  );

  for (const tick of chart.xTicks) {
    parts.push(
      `<line x1="${fmt(tick.x)}" y1="${MARGIN.top}" x2="${fmt(tick.x)}" y2="${plotBottom}" stroke="#e4e4e4" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(tick.x)}" y="${plotBottom + 20}" text-anchor="middle" font-size="12" ${FONT}>${tick.value}</text>`,
    );
  }
  for (const tick of chart.yTicks) {
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(tick.y)}" x2="${plotRight}" y2="${fmt(tick.y)}" stroke="#e4e4e4" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(tick.y + 4)}" text-anchor="end" font-size="12" ${FONT}>${escapeXml(tick.label)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${plotBottom}" x2="${plotRight}" y2="${plotBottom}" stroke="#222222" stroke-width="1.5"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${plotBottom}" stroke="#222222" stroke-width="1.5"/>`,
  );
  parts.push(
    `<text x="${(MARGIN.left + plotRight) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="14" ${FONT}>coarsening degree eta</text>`,
  );
  parts.push(
    `<text x="20" y="${(MARGIN.top + plotBottom) / 2}" text-anchor="middle" font-size="14" ${FONT} transform="rotate(-90 20 ${(MARGIN.top + plotBottom) / 2})">${escapeXml(options.yLabel)}</text>`,
  );

  const annotations: string[] = [];
  for (const series of chart.series) {
    for (const segment of series.segments) {
      const points = segment.map((p) => `${fmt(p.x)},${fmt(p.y)}`).join(" ");
      parts.push(
        `<polyline class="${series.cssClass}" points="${points}" fill="none" stroke="${series.color}" stroke-width="2"/>`,
      );
    }
    if (series.truncatedAt.length > 0) {
      annotations.push(
        `${series.label} diverges from eta = ${series.truncatedAt[0]}`,
      );
    }
  }

  // legend
  let legendY = MARGIN.top + 10;
  for (const series of chart.series) {
    parts.push(
      `<line x1="${MARGIN.left + 12}" y1="${legendY}" x2="${MARGIN.left + 44}" y2="${legendY}" stroke="${series.color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left + 50}" y="${legendY + 4}" font-size="13" ${FONT}>${escapeXml(series.label)}</text>`,
    );
    legendY += 18;
  }
  for (const note of annotations) {
    parts.push(
      `<text class="truncation-note" x="${MARGIN.left + 12}" y="${legendY + 4}" font-size="12" fill="#8a1f1f" ${FONT}>${escapeXml(note)}</text>`,
    );
    legendY += 18;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
