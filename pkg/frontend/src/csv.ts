/**
 * Strict CSV reading for the solver's export schemas.
 *
 * Every schema violation throws CsvError carrying `file:line:` so bad rows
 * are directly addressable in the source file.
 */

export class CsvError extends Error {}

export interface CsvTable {
  header: string[];
  /** raw cell strings, one array per data row */
  rows: string[][];
  /** 1-based line number of each data row in the file */
  lineNo: number[];
  file: string;
}

export function parseCsv(text: string, file: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((l, i, arr) => !(l === "" && i === arr.length - 1));
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new CsvError(`${file}:1: empty file (no header)`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: string[][] = [];
  const lineNo: number[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i] === "") continue;
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `${file}:${i + 1}: expected ${header.length} columns, got ${cells.length}`,
      );
    }
    rows.push(cells);
    lineNo.push(i + 1);
  }
  return { header, rows, lineNo, file };
}

export function requireColumns(table: CsvTable, required: string[]): Map<string, number> {
  const index = new Map<string, number>();
  table.header.forEach((name, i) => index.set(name, i));
  for (const name of required) {
    if (!index.has(name)) {
      throw new CsvError(`${table.file}:1: missing required column '${name}'`);
    }
  }
  return index;
}

export function numberAt(table: CsvTable, row: number, col: number, name: string): number {
  const raw = table.rows[row][col];
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new CsvError(
      `${table.file}:${table.lineNo[row]}: column '${name}' is not a finite number ('${raw}')`,
    );
  }
  return value;
}

export function intAt(table: CsvTable, row: number, col: number, name: string): number {
  const value = numberAt(table, row, col, name);
  if (!Number.isInteger(value)) {
    throw new CsvError(
      `${table.file}:${table.lineNo[row]}: column '${name}' is not an integer ('${table.rows[row][col]}')`,
    );
  }
  return value;
}
