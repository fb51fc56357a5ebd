/** Typed readers for the three export schemas the solver CLI writes. */

import { CsvError, CsvTable, intAt, numberAt, parseCsv, requireColumns } from "./csv.js";
import { readFileSync } from "fs";

export interface FrontRow {
  runId: string;
  problem: string;
  hMax: number | null;
  startLabel: string;
  j1: number;
  j2: number;
  iters: number;
  status: string;
}

export interface TraceRow {
  iter: number;
  xiSetSize: number;
  vNorm: number;
  f: number[];
}

export interface FieldRow {
  nodeId: number;
  x1: number;
  x2: number;
  u: number;
  y: number;
  psi: number;
  active: 0 | 1;
}

function load(file: string): CsvTable {
  return parseCsv(readFileSync(file, "utf8"), file);
}

export function readFront(file: string): FrontRow[] {
  const t = load(file);
  const col = requireColumns(t, [
    "run_id", "problem", "h_max", "start_label", "J1", "J2", "iters", "status",
  ]);
  const rows: FrontRow[] = [];
  for (let r = 0; r < t.rows.length; r++) {
    const hRaw = t.rows[r][col.get("h_max")!].trim();
    rows.push({
      runId: t.rows[r][col.get("run_id")!],
      problem: t.rows[r][col.get("problem")!],
      hMax: hRaw === "" ? null : numberAt(t, r, col.get("h_max")!, "h_max"),
      startLabel: t.rows[r][col.get("start_label")!],
      j1: numberAt(t, r, col.get("J1")!, "J1"),
      j2: numberAt(t, r, col.get("J2")!, "J2"),
      iters: intAt(t, r, col.get("iters")!, "iters"),
      status: t.rows[r][col.get("status")!],
    });
  }
  if (rows.length === 0) {
    throw new CsvError(`${file}:1: front has no data rows`);
  }
  return rows;
}

export function readTrace(file: string): TraceRow[] {
  const t = load(file);
  const col = requireColumns(t, ["iter", "xi_set_size", "v_norm"]);
  const fCols: Array<[string, number]> = [];
  t.header.forEach((name, i) => {
    if (/^f\d+$/.test(name)) fCols.push([name, i]);
  });
  if (fCols.length === 0) {
    throw new CsvError(`${file}:1: no objective columns (f1, f2, ...)`);
  }
  const rows: TraceRow[] = [];
  for (let r = 0; r < t.rows.length; r++) {
    rows.push({
      iter: intAt(t, r, col.get("iter")!, "iter"),
      xiSetSize: intAt(t, r, col.get("xi_set_size")!, "xi_set_size"),
      vNorm: numberAt(t, r, col.get("v_norm")!, "v_norm"),
      f: fCols.map(([name, i]) => numberAt(t, r, i, name)),
    });
  }
  if (rows.length === 0) {
    throw new CsvError(`${file}:1: trace has no data rows`);
  }
  return rows;
}

export function readField(file: string): FieldRow[] {
  const t = load(file);
  const col = requireColumns(t, ["node_id", "x1", "x2", "u", "y", "psi", "active"]);
  const rows: FieldRow[] = [];
  for (let r = 0; r < t.rows.length; r++) {
    const active = intAt(t, r, col.get("active")!, "active");
    if (active !== 0 && active !== 1) {
      throw new CsvError(
        `${file}:${t.lineNo[r]}: column 'active' must be 0 or 1 ('${active}')`,
      );
    }
    rows.push({
      nodeId: intAt(t, r, col.get("node_id")!, "node_id"),
      x1: numberAt(t, r, col.get("x1")!, "x1"),
      x2: numberAt(t, r, col.get("x2")!, "x2"),
      u: numberAt(t, r, col.get("u")!, "u"),
      y: numberAt(t, r, col.get("y")!, "y"),
      psi: numberAt(t, r, col.get("psi")!, "psi"),
      active: active as 0 | 1,
    });
  }
  if (rows.length === 0) {
    throw new CsvError(`${file}:1: field has no data rows`);
  }
  return rows;
}
