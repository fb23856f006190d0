/**
 * Reader for the headered CSVs produced by the ris-wideband CLI: one JSON
 * metadata line ("# {...}"), a column header row, then data rows.
 */

import { readFileSync } from "node:fs";

export interface CsvMeta {
  scenario_hash: string;
  seed: number;
  kind: string;
  [key: string]: unknown;
}

export interface HeaderedCsv {
  meta: CsvMeta;
  columns: string[];
  rows: string[][];
  path: string;
}

export class SchemaError extends Error {}

export function readHeaderedCsv(path: string): HeaderedCsv {
  const text = readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0 || !lines[0].startsWith("# ")) {
    throw new SchemaError(`${path}: missing JSON header line`);
  }
  let meta: CsvMeta;
  try {
    meta = JSON.parse(lines[0].slice(2));
  } catch (e) {
    throw new SchemaError(`${path}: unparseable JSON header: ${e}`);
  }
  if (lines.length < 2) {
    throw new SchemaError(`${path}: missing column header`);
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((l) => l.split(","));
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { meta, columns, rows, path };
}

/** Columns must match exactly (prefix match allowed for optional extras). */
export function requireColumns(csv: HeaderedCsv, expected: string[]): void {
  const missing = expected.filter((c) => !csv.columns.includes(c));
  const extra = csv.columns.filter((c) => !expected.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${csv.path}: schema mismatch; missing [${missing.join(", ")}], ` +
        `found [${csv.columns.join(", ")}], unexpected [${extra.join(", ")}]`,
    );
  }
}

/** Combined inputs must agree on the scenario hash. */
export function requireSameScenario(inputs: HeaderedCsv[]): void {
  const hashes = new Set(inputs.map((c) => c.meta.scenario_hash));
  if (hashes.size > 1) {
    throw new SchemaError(
      `inputs mix scenario hashes: ${[...hashes].join(" vs ")}`,
    );
  }
}

export function numericColumn(csv: HeaderedCsv, name: string): number[] {
  const idx = csv.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`${csv.path}: missing column ${name}`);
  return csv.rows.map((r) => {
    const v = r[idx];
    return v === "null" ? NaN : Number(v);
  });
}
