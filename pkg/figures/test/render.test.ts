import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, main } from "../src/cli.js";
import { render } from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");

let workdir: string;
beforeAll(() => {
  workdir = mkdtempSync(join(tmpdir(), "figures-test-"));
});

function readEcho(svgText: string): { rows: Array<Record<string, number | string>> } {
  const match = svgText.match(/<metadata id="data-echo">([\s\S]*?)<\/metadata>/);
  expect(match).not.toBeNull();
  const unescaped = match![1]
    .replace(/&quot;/g, '"')
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&amp;/g, "&");
  return JSON.parse(unescaped);
}

describe("SVG rendering", () => {
  it.each(["fig1", "fig2", "fig3"])("renders %s with two curves", (name) => {
    const out = join(workdir, `${name}.svg`);
    render({ inputCsv: join(FIXTURES, `${name}.csv`), output: out, format: "svg" });
    const text = readFileSync(out, "utf-8");
    expect(text).toContain('class="series-sim"');
    expect(text).toContain('class="series-ind"');
    expect(text).toContain("simultaneous");
    expect(text).toContain("independent");
  });

  it("echoes the fig3 data with the constant one-half ratio", () => {
    const out = join(workdir, "fig3-echo.svg");
    render({ inputCsv: join(FIXTURES, "fig3.csv"), output: out, format: "svg" });
    const echo = readEcho(readFileSync(out, "utf-8"));
    expect(echo.rows.length).toBe(101);
    for (const row of echo.rows) {
      const sim = row.sim_precision as number;
      const ind = row.ind_precision as number;
      expect(Math.abs(sim - 0.5 * ind)).toBeLessThanOrEqual(1e-9 * Math.max(1, ind));
    }
  });

  it("echoes exactly the parsed CSV values, no recomputation", () => {
    const out = join(workdir, "fig1-echo.svg");
    render({ inputCsv: join(FIXTURES, "fig1.csv"), output: out, format: "svg" });
    const echo = readEcho(readFileSync(out, "utf-8"));
    const lines = readFileSync(join(FIXTURES, "fig1.csv"), "utf-8").trim().split("\n");
    const header = lines[0].split(",");
    const simIdx = header.indexOf("sim_precision");
    for (let i = 0; i < echo.rows.length; i++) {
      const csvValue = Number(lines[i + 1].split(",")[simIdx]);
      expect(echo.rows[i].sim_precision).toBe(csvValue);
    }
  });

  it("is byte-identical across reruns", () => {
    const outA = join(workdir, "det-a.svg");
    const outB = join(workdir, "det-b.svg");
    for (const out of [outA, outB]) {
      render({ inputCsv: join(FIXTURES, "fig2.csv"), output: out, format: "svg" });
    }
    expect(readFileSync(outA)).toEqual(readFileSync(outB));
  });

  it("truncates diverging values and annotates the cut", () => {
    const csv = join(workdir, "diverging.csv");
    writeFileSync(
      csv,
      "eta,sim_precision,ind_precision\n" +
        "0,3.1,6.2\n0.5,4.0,7.0\n1.0,inf,8.0\n1.5,inf,9.0\n",
    );
    const out = join(workdir, "diverging.svg");
    render({ inputCsv: csv, output: out, format: "svg" });
    const text = readFileSync(out, "utf-8");
    expect(text).toContain('class="truncation-note"');
    expect(text).toContain("diverges from eta = 1");
    const simPoints = [...text.matchAll(/class="series-sim" points="([^"]*)"/g)];
    expect(simPoints).toHaveLength(1);
    expect(simPoints[0][1].split(" ")).toHaveLength(2); // finite prefix only
  });

  it("supports a log-scaled y axis", () => {
    const out = join(workdir, "fig1-log.svg");
    render({
      inputCsv: join(FIXTURES, "fig1.csv"),
      output: out,
      format: "svg",
      logY: true,
    });
    expect(readFileSync(out, "utf-8")).toContain("series-sim");
  });
});

function pngChunks(bytes: Buffer): Array<{ type: string; payload: Buffer }> {
  const chunks: Array<{ type: string; payload: Buffer }> = [];
  let at = 8;
  while (at < bytes.length) {
    const length = bytes.readUInt32BE(at);
    const type = bytes.toString("latin1", at + 4, at + 8);
    chunks.push({ type, payload: bytes.subarray(at + 8, at + 8 + length) });
    at += 12 + length;
  }
  return chunks;
}

describe("PNG rendering", () => {
  it("writes a valid PNG with the data echo in a tEXt chunk", () => {
    const out = join(workdir, "fig3.png");
    render({ inputCsv: join(FIXTURES, "fig3.csv"), output: out, format: "png" });
    const bytes = readFileSync(out);
    expect([...bytes.subarray(0, 8)]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
    expect(bytes.readUInt32BE(16)).toBe(800); // IHDR width
    expect(bytes.readUInt32BE(20)).toBe(500); // IHDR height
    const chunks = pngChunks(bytes);
    expect(chunks.map((c) => c.type)).toEqual(["IHDR", "tEXt", "IDAT", "IEND"]);
    const text = chunks[1].payload.toString("latin1");
    const [keyword, value] = text.split("\0");
    expect(keyword).toBe("data-echo");
    const echo = JSON.parse(value) as { rows: Array<{ sim_precision: number; ind_precision: number }> };
    expect(echo.rows).toHaveLength(101);
    for (const row of echo.rows) {
      expect(Math.abs(row.sim_precision - 0.5 * row.ind_precision)).toBeLessThanOrEqual(
        1e-9 * Math.max(1, row.ind_precision),
      );
    }
  });

  it("is byte-identical across reruns", () => {
    const outA = join(workdir, "det-a.png");
    const outB = join(workdir, "det-b.png");
    for (const out of [outA, outB]) {
      render({ inputCsv: join(FIXTURES, "fig1.csv"), output: out, format: "png" });
    }
    expect(readFileSync(outA)).toEqual(readFileSync(outB));
  });
});

describe("CLI", () => {
  it("renders through the command surface", () => {
    const out = join(workdir, "cli.svg");
    const code = main([
      "render",
      "--input",
      join(FIXTURES, "fig1.csv"),
      "--out",
      out,
      "--format",
      "svg",
      "--title",
      "precision vs coarsening",
    ]);
    expect(code).toBe(EXIT_OK);
    expect(readFileSync(out, "utf-8")).toContain("precision vs coarsening");
  });

  it("reports missing columns by name with the data exit code", () => {
    const bad = join(workdir, "bad.csv");
    writeFileSync(bad, "eta,gamma\n0,1\n1,0.6\n");
    const code = main(["render", "--input", bad, "--out", join(workdir, "bad.svg"), "--format", "svg"]);
    expect(code).toBe(EXIT_DATA);
  });

  it("maps missing files to the I/O exit code", () => {
    const code = main([
      "render",
      "--input",
      join(workdir, "nonexistent.csv"),
      "--out",
      join(workdir, "x.svg"),
      "--format",
      "svg",
    ]);
    expect(code).toBe(EXIT_IO);
  });

  it("rejects bad usage", () => {
    expect(main(["render", "--input", "x.csv"])).toBe(EXIT_USAGE);
    expect(main(["plot"])).toBe(EXIT_USAGE);
    expect(main(["render", "--input", "a", "--out", "b", "--format", "gif"])).toBe(EXIT_USAGE);
  });
});
