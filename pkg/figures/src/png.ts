/** Minimal deterministic PNG writer: RGBA raster, 5x7 bitmap font, zlib IDAT.
 *
 * The same chart geometry as the SVG path is rasterized here; the data echo
 * travels in a tEXt chunk under the keyword "data-echo".
 */

import { deflateSync } from "node:zlib";

import { HEIGHT, MARGIN, WIDTH, layoutChart } from "./chart.js";
import type { SweepRow } from "./csv.js";
import { dataEcho } from "./svg.js";

type Rgb = [number, number, number];

const BLACK: Rgb = [34, 34, 34];
const GREY: Rgb = [228, 228, 228];
const RED: Rgb = [138, 31, 31];

// classic column-encoded 5x7 glyphs, bit 0 = top row
const GLYPHS: Record<string, number[]> = {
  "0": [0x3e, 0x51, 0x49, 0x45, 0x3e],
  "1": [0x00, 0x42, 0x7f, 0x40, 0x00],
  "2": [0x42, 0x61, 0x51, 0x49, 0x46],
  "3": [0x21, 0x41, 0x45, 0x4b, 0x31],
  "4": [0x18, 0x14, 0x12, 0x7f, 0x10],
  "5": [0x27, 0x45, 0x45, 0x45, 0x39],
  "6": [0x3c, 0x4a, 0x49, 0x49, 0x30],
  "7": [0x01, 0x71, 0x09, 0x05, 0x03],
  "8": [0x36, 0x49, 0x49, 0x49, 0x36],
  "9": [0x06, 0x49, 0x49, 0x29, 0x1e],
  A: [0x7e, 0x11, 0x11, 0x11, 0x7e],
  B: [0x7f, 0x49, 0x49, 0x49, 0x36],
  C: [0x3e, 0x41, 0x41, 0x41, 0x22],
  D: [0x7f, 0x41, 0x41, 0x22, 0x1c],
  E: [0x7f, 0x49, 0x49, 0x49, 0x41],
  F: [0x7f, 0x09, 0x09, 0x09, 0x01],
  G: [0x3e, 0x41, 0x49, 0x49, 0x7a],
  H: [0x7f, 0x08, 0x08, 0x08, 0x7f],
  I: [0x00, 0x41, 0x7f, 0x41, 0x00],
  J: [0x20, 0x40, 0x41, 0x3f, 0x01],
  K: [0x7f, 0x08, 0x14, 0x22, 0x41],
  L: [0x7f, 0x40, 0x40, 0x40, 0x40],
  M: [0x7f, 0x02, 0x0c, 0x02, 0x7f],
  N: [0x7f, 0x04, 0x08, 0x10, 0x7f],
  O: [0x3e, 0x41, 0x41, 0x41, 0x3e],
  P: [0x7f, 0x09, 0x09, 0x09, 0x06],
  Q: [0x3e, 0x41, 0x51, 0x21, 0x5e],
  R: [0x7f, 0x09, 0x19, 0x29, 0x46],
  S: [0x46, 0x49, 0x49, 0x49, 0x31],
  T: [0x01, 0x01, 0x7f, 0x01, 0x01],
  U: [0x3f, 0x40, 0x40, 0x40, 0x3f],
  V: [0x1f, 0x20, 0x40, 0x20, 0x1f],
  W: [0x3f, 0x40, 0x38, 0x40, 0x3f],
  X: [0x63, 0x14, 0x08, 0x14, 0x63],
  Y: [0x07, 0x08, 0x70, 0x08, 0x07],
  Z: [0x61, 0x51, 0x49, 0x45, 0x43],
  " ": [0x00, 0x00, 0x00, 0x00, 0x00],
  ".": [0x00, 0x60, 0x60, 0x00, 0x00],
  ",": [0x00, 0x50, 0x30, 0x00, 0x00],
  "-": [0x08, 0x08, 0x08, 0x08, 0x08],
  "+": [0x08, 0x08, 0x3e, 0x08, 0x08],
  "=": [0x14, 0x14, 0x14, 0x14, 0x14],
  ":": [0x00, 0x36, 0x36, 0x00, 0x00],
  "/": [0x20, 0x10, 0x08, 0x04, 0x02],
  "(": [0x00, 0x1c, 0x22, 0x41, 0x00],
  ")": [0x00, 0x41, 0x22, 0x1c, 0x00],
};

class Raster {
  readonly data: Uint8Array;
  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const at = (yi * this.width + xi) * 4;
    this.data[at] = r;
    this.data[at + 1] = g;
    this.data[at + 2] = b;
    this.data[at + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, thick = 1): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      for (let ox = 0; ox < thick; ox++) {
        for (let oy = 0; oy < thick; oy++) {
          this.set(xa + ox, ya + oy, color);
        }
      }
      if (xa === xb && ya === yb) break;
      const doubled = 2 * err;
      if (doubled >= dy) {
        err += dy;
        xa += sx;
      }
      if (doubled <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  /** Uppercased 5x7 text; unknown glyphs render as blanks. */
  text(x: number, y: number, message: string, color: Rgb, scale = 1): void {
    let cursor = Math.round(x);
    for (const raw of message.toUpperCase()) {
      const glyph = GLYPHS[raw] ?? GLYPHS[" "];
      for (let col = 0; col < 5; col++) {
        for (let row = 0; row < 7; row++) {
          if ((glyph[col] >> row) & 1) {
            for (let ox = 0; ox < scale; ox++) {
              for (let oy = 0; oy < scale; oy++) {
                this.set(cursor + col * scale + ox, y + row * scale + oy, color);
              }
            }
          }
        }
      }
      cursor += 6 * scale;
    }
  }

  textWidth(message: string, scale = 1): number {
    return message.length * 6 * scale;
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of bytes) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, payload.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(payload, 8);
  view.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

function encodePng(raster: Raster, textChunks: [string, string][]): Buffer {
  const signature = Uint8Array.from([137, 80, 78, 71, 13, 10, 26, 10]);
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, raster.width);
  view.setUint32(4, raster.height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const stride = raster.width * 4;
  const filtered = new Uint8Array((stride + 1) * raster.height);
  for (let y = 0; y < raster.height; y++) {
    filtered[y * (stride + 1)] = 0;
    filtered.set(raster.data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const idat = deflateSync(filtered, { level: 9 });
  const pieces: Uint8Array[] = [signature, chunk("IHDR", ihdr)];
  for (const [keyword, value] of textChunks) {
    const payload = Buffer.from(`${keyword}\0${value}`, "latin1");
    pieces.push(chunk("tEXt", payload));
  }
  pieces.push(chunk("IDAT", idat), chunk("IEND", new Uint8Array(0)));
  return Buffer.concat(pieces);
}

function hexToRgb(hex: string): Rgb {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

export function renderPng(
  rows: SweepRow[],
  options: { title: string; yLabel: string; logY: boolean },
): Buffer {
  const chart = layoutChart(rows, options.logY);
  const raster = new Raster(WIDTH, HEIGHT);
  const plotBottom = HEIGHT - MARGIN.bottom;
  const plotRight = WIDTH - MARGIN.right;

  for (const tick of chart.xTicks) {
    raster.line(tick.x, MARGIN.top, tick.x, plotBottom, GREY);
    const label = String(tick.value);
    raster.text(tick.x - raster.textWidth(label) / 2, plotBottom + 10, label, BLACK);
  }
  for (const tick of chart.yTicks) {
    raster.line(MARGIN.left, tick.y, plotRight, tick.y, GREY);
    raster.text(MARGIN.left - 10 - raster.textWidth(tick.label), tick.y - 3, tick.label, BLACK);
  }
  raster.line(MARGIN.left, plotBottom, plotRight, plotBottom, BLACK, 2);
  raster.line(MARGIN.left, MARGIN.top, MARGIN.left, plotBottom, BLACK, 2);
  raster.text(
    WIDTH / 2 - raster.textWidth(options.title, 2) / 2,
    14,
    options.title,
    BLACK,
    2,
  );
  const xAxisLabel = "coarsening degree eta";
  raster.text(
    (MARGIN.left + plotRight) / 2 - raster.textWidth(xAxisLabel) / 2,
    HEIGHT - 22,
    xAxisLabel,
    BLACK,
  );
  raster.text(8, MARGIN.top - 18, options.yLabel, BLACK);

  let legendY = MARGIN.top + 8;
  const annotations: string[] = [];
  for (const series of chart.series) {
    const color = hexToRgb(series.color);
    for (const segment of series.segments) {
      for (let i = 1; i < segment.length; i++) {
        raster.line(segment[i - 1].x, segment[i - 1].y, segment[i].x, segment[i].y, color, 2);
      }
    }
    raster.line(MARGIN.left + 12, legendY, MARGIN.left + 44, legendY, color, 2);
    raster.text(MARGIN.left + 50, legendY - 3, series.label, BLACK);
    legendY += 16;
    if (series.truncatedAt.length > 0) {
      annotations.push(`${series.label} diverges from eta = ${series.truncatedAt[0]}`);
    }
  }
  for (const note of annotations) {
    raster.text(MARGIN.left + 12, legendY, note, RED);
    legendY += 16;
  }

  return encodePng(raster, [["data-echo", dataEcho(rows)]]);
}
