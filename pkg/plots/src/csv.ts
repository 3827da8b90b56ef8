import { readFileSync } from "node:fs";

import Papa from "papaparse";

import { CsvError } from "./errors.js";

/** One parsed CSV file: column names plus rows keyed by column. */
export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

/**
 * Read one CSV table and check that every required column is present.
 *
 * Lines starting with `#` (the embedded manifest-hash line) are skipped.
 * Raises CsvError with a column diagnostic on a header mismatch, and on
 * files that are unreadable, malformed, or carry no data rows.
 */
export function readTable(path: string, required: readonly string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`${path}: cannot read file (${(err as Error).message})`);
  }
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    delimiter: ",",
    comments: "#",
    skipEmptyLines: true,
  });
  const columns = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    const found = columns.length > 0 ? columns.join(", ") : "(no header)";
    throw new CsvError(
      `${path}: missing column(s): ${missing.join(", ")}; found: ${found}`,
    );
  }
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    const where = first.row === undefined ? "" : ` (data row ${first.row})`;
    throw new CsvError(`${path}: ${first.message}${where}`);
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return { path, columns: [...columns], rows: parsed.data };
}

/** Parse a numeric cell; the harness writes IEEE infinities as "inf"/"-inf". */
export function toNumber(raw: string | undefined, context: string): number {
  const s = (raw ?? "").trim();
  if (s === "inf") return Infinity;
  if (s === "-inf") return -Infinity;
  const v = Number(s);
  if (s === "" || Number.isNaN(v)) {
    throw new CsvError(`${context}: not a number: "${raw ?? ""}"`);
  }
  return v;
}
