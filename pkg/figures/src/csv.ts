/** Strict reader for the sweep CSV schema emitted by the spinmet CLI. */

export const REQUIRED_COLUMNS = ["eta", "sim_precision", "ind_precision"] as const;

export interface SweepRow {
  eta: number;
  /** Positive infinity marks a diverging (singular-information) point. */
  sim_precision: number;
  ind_precision: number;
}

export class SchemaError extends Error {
  readonly missing: string[];
  constructor(missing: string[]) {
    super(`CSV is missing required column(s): ${missing.join(", ")}`);
    this.name = "SchemaError";
    this.missing = missing;
  }
}

export class DataError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "DataError";
  }
}

function parseNumber(raw: string, column: string, line: number): number {
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new DataError(`line ${line}: column ${column}: not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new DataError("CSV file is empty");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(missing);
  }
  if (lines.length < 3) {
    throw new DataError(`need at least 2 data rows, found ${lines.length - 1}`);
  }
  const index = Object.fromEntries(header.map((name, i) => [name, i]));
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new DataError(`line ${i + 1}: expected ${header.length} cells, found ${cells.length}`);
    }
    rows.push({
      eta: parseNumber(cells[index.eta], "eta", i + 1),
      sim_precision: parseNumber(cells[index.sim_precision], "sim_precision", i + 1),
      ind_precision: parseNumber(cells[index.ind_precision], "ind_precision", i + 1),
    });
  }
  return rows;
}
