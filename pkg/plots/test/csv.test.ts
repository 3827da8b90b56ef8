import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CsvError, readTable, toNumber } from "../src/index.js";

const SUMMARY = fileURLToPath(
  new URL("./fixtures/sweep/summary.csv", import.meta.url),
);

function tmpCsv(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-csv-"));
  const path = join(dir, name);
  writeFileSync(path, text);
  return path;
}

describe("readTable", () => {
  it("parses harness CSV and skips the embedded manifest comment line", () => {
    const table = readTable(SUMMARY, ["deployment", "scheme", "sum_se_mean"]);
    expect(table.columns[0]).toBe("deployment");
    expect(table.rows.length).toBe(33);
    for (const row of table.rows) {
      expect(row.deployment.startsWith("#")).toBe(false);
    }
  });

  it("names every missing column and lists the columns found", () => {
    const path = tmpCsv("bad.csv", "a,b\n1,2\n");
    expect(() => readTable(path, ["a", "x", "y"])).toThrowError(
      /missing column\(s\): x, y; found: a, b/,
    );
  });

  it("rejects a header-only file", () => {
    const path = tmpCsv("empty.csv", "a,b\n");
    expect(() => readTable(path, ["a"])).toThrowError(/no data rows/);
  });

  it("rejects a zero-byte file with a no-header diagnostic", () => {
    const path = tmpCsv("zero.csv", "");
    expect(() => readTable(path, ["a"])).toThrowError(/\(no header\)/);
  });

  it("rejects a missing file", () => {
    expect(() => readTable("/nonexistent/nope.csv", ["a"])).toThrowError(
      CsvError,
    );
    expect(() => readTable("/nonexistent/nope.csv", ["a"])).toThrowError(
      /cannot read file/,
    );
  });

  it("rejects rows whose field count does not match the header", () => {
    const path = tmpCsv("ragged.csv", "a,b\n1,2\n3\n");
    expect(() => readTable(path, ["a"])).toThrowError(/data row/);
  });
});

describe("toNumber", () => {
  it("parses the harness infinity spellings", () => {
    expect(toNumber("-inf", "t")).toBe(-Infinity);
    expect(toNumber("inf", "t")).toBe(Infinity);
    expect(toNumber("-10.0", "t")).toBe(-10);
  });

  it("rejects non-numeric text with the offending value", () => {
    expect(() => toNumber("abc", "file.csv column M")).toThrowError(
      /file\.csv column M: not a number: "abc"/,
    );
    expect(() => toNumber("", "t")).toThrowError(CsvError);
    expect(() => toNumber(undefined, "t")).toThrowError(CsvError);
  });
});
