/**
 * Reader for the fluxdot CLI's CSV output: a block of '#'-prefixed
 * metadata lines, a header row, then numeric rows.
 */
import * as fs from "fs";
import Papa from "papaparse";

export class SchemaMismatch extends Error {}
export class EmptyInput extends Error {}
export class GridMismatch extends Error {}

export interface Table {
  path: string;
  /** "command", "convention", "units", "config.<key>", ... */
  metadata: Record<string, string>;
  columns: string[];
  rows: number[][];
}

function parseMetadata(lines: string[]): Record<string, string> {
  const meta: Record<string, string> = {};
  for (const line of lines) {
    const body = line.replace(/^#\s?/, "");
    const eq = body.match(/^(config\.[\w.]+)\s*=\s*(.*)$/);
    if (eq) {
      meta[eq[1]] = eq[2];
      continue;
    }
    const colon = body.match(/^([\w-]+):\s*(.*)$/);
    if (colon) {
      meta[colon[1]] = colon[2];
    }
  }
  return meta;
}

export function readTable(path: string): Table {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/);
  const metaLines = lines.filter((l) => l.startsWith("#"));
  const dataText = lines.filter((l) => !l.startsWith("#")).join("\n");

  const parsed = Papa.parse<string[]>(dataText.trim(), {
    skipEmptyLines: true,
  });
  const grid = parsed.data;
  if (grid.length === 0) {
    throw new EmptyInput(`${path}: no header row`);
  }
  const columns = grid[0];
  const rows = grid.slice(1).map((r) => r.map(Number));
  if (rows.length === 0) {
    throw new EmptyInput(`${path}: no data rows`);
  }
  for (const r of rows) {
    if (r.length !== columns.length) {
      throw new SchemaMismatch(
        `${path}: row with ${r.length} cells, expected ${columns.length}`,
      );
    }
  }
  return { path, metadata: parseMetadata(metaLines), columns, rows };
}

/** Throw SchemaMismatch naming the first column the table is missing. */
export function requireColumns(table: Table, needed: string[]): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new SchemaMismatch(`${table.path}: missing column "${name}"`);
    }
  }
}

export function col(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new SchemaMismatch(`${table.path}: missing column "${name}"`);
  }
  return table.rows.map((r) => r[i]);
}

export function configNumber(table: Table, key: string): number | undefined {
  const raw = table.metadata[`config.${key}`];
  if (raw === undefined) return undefined;
  const v = Number(raw);
  return Number.isFinite(v) ? v : undefined;
}

/**
 * All tables must share the reference table's grid column exactly
 * (same file format, same generator => bit-identical text, so the
 * parsed numbers must match with no tolerance).
 */
export function requireSameGrid(
  tables: Table[],
  column: string,
): void {
  if (tables.length < 2) return;
  const ref = col(tables[0], column);
  for (const t of tables.slice(1)) {
    const g = col(t, column);
    const same =
      g.length === ref.length && g.every((x, i) => x === ref[i]);
    if (!same) {
      throw new GridMismatch(
        `${t.path}: "${column}" grid differs from ${tables[0].path}`,
      );
    }
  }
}
