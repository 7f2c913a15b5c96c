/**
 * Minimal CSV reading for the solver's output files.
 *
 * The files are plain comma-separated tables with one header row; cells are
 * numeric except that order columns may be empty on the first row.
 */

import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: number[][]; // empty cells become NaN
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("CSV is empty");
  }
  const header = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`CSV row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    rows.push(
      cells.map((c) => {
        const t = c.trim();
        if (t === "") return NaN;
        const v = Number(t);
        if (Number.isNaN(v)) throw new Error(`CSV row ${i + 1}: not a number: ${t}`);
        return v;
      }),
    );
  }
  return { header, rows };
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text);
}

/** Column by name; reports the missing name rather than an index error. */
export function column(table: Table, name: string): number[] {
  const k = table.header.indexOf(name);
  if (k < 0) {
    throw new Error(`CSV is missing column "${name}" (has: ${table.header.join(", ")})`);
  }
  return table.rows.map((r) => r[k]);
}
