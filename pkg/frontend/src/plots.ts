/**
 * The four plot kinds over solver exports.
 *
 * Each renderer is split into a pure data transform (exported for tests)
 * and an SVG emission step; renderers return the complete SVG string so
 * callers write output only after everything succeeded.
 */

import { CsvError } from "./csv.js";
import { FieldRow, FrontRow, TraceRow, readField, readFront, readTrace } from "./schemas.js";
import {
  Frame,
  PALETTE,
  SvgDoc,
  drawAxes,
  drawMarker,
  fmt,
  heatColor,
  linearScale,
  logScale,
  markerFor,
} from "./svg.js";

const W = 560;
const H = 420;
const MARGIN = { left: 64, right: 16, top: 24, bottom: 48 };

function frame(doc: SvgDoc, xDom: [number, number], yDom: [number, number], log = false): Frame {
  const make = log ? logScale : linearScale;
  return {
    x: make(xDom, [MARGIN.left, doc.width - MARGIN.right]),
    y: make(yDom, [doc.height - MARGIN.bottom, MARGIN.top]),
    left: MARGIN.left,
    top: MARGIN.top,
    right: doc.width - MARGIN.right,
    bottom: doc.height - MARGIN.bottom,
  };
}

function pad([lo, hi]: [number, number]): [number, number] {
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - 0.06 * span, hi + 0.06 * span];
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

// ------------------------------------------------------------------ front

export function renderFront(frontFile: string): string {
  const rows = readFront(frontFile);
  const doc = new SvgDoc(W, H);
  const f = frame(doc, pad(extent(rows.map((r) => r.j1))), pad(extent(rows.map((r) => r.j2))));
  drawAxes(doc, f, "J1 (state misfit)", "J2 (control cost)");
  doc.text(W / 2, 14, `approximate fronts: ${rows[0].problem}`, 'font-size="12" text-anchor="middle"');

  const hLevels = [...new Set(rows.map((r) => String(r.hMax)))].sort();
  const labels = [...new Set(rows.map((r) => r.startLabel))].sort();
  for (const r of rows) {
    const color = PALETTE[hLevels.indexOf(String(r.hMax)) % PALETTE.length];
    drawMarker(doc, markerFor(labels.indexOf(r.startLabel)), f.x(r.j1), f.y(r.j2), color);
  }
  // legend: one color entry per mesh level, one marker entry per start
  let ly = MARGIN.top + 8;
  for (const h of hLevels) {
    const color = PALETTE[hLevels.indexOf(h) % PALETTE.length];
    doc.add(`<rect x="${W - 130}" y="${ly - 8}" width="10" height="10" fill="${color}"/>`);
    doc.text(W - 116, ly, h === "null" ? "(no mesh)" : `h_max=${h}`, 'font-size="10"');
    ly += 14;
  }
  for (const [i, label] of labels.entries()) {
    drawMarker(doc, markerFor(i), W - 125, ly - 3, "#333", 3.5);
    doc.text(W - 116, ly, label, 'font-size="10"');
    ly += 13;
  }
  return doc.render();
}

// ---------------------------------------------------------------- refdist

export interface RefdistSeries {
  label: string;
  points: Array<{ h: number; dist: number }>;
}

/** Image-space distance of each run to the reference run with the same
 * start label, grouped by label and sorted by mesh size. */
export function refdistSeries(runs: FrontRow[], reference: FrontRow[]): RefdistSeries[] {
  const ref = new Map<string, FrontRow>();
  for (const r of reference) ref.set(r.startLabel, r);
  const byLabel = new Map<string, Array<{ h: number; dist: number }>>();
  for (const r of runs) {
    const match = ref.get(r.startLabel);
    if (!match) {
      throw new CsvError(`no reference run for start label '${r.startLabel}'`);
    }
    if (r.hMax === null) {
      throw new CsvError(`run '${r.runId}' has no mesh size; refdist needs h_max`);
    }
    const dist = Math.hypot(r.j1 - match.j1, r.j2 - match.j2);
    if (!byLabel.has(r.startLabel)) byLabel.set(r.startLabel, []);
    byLabel.get(r.startLabel)!.push({ h: r.hMax, dist });
  }
  return [...byLabel.entries()]
    .map(([label, points]) => ({ label, points: points.sort((a, b) => a.h - b.h) }))
    .sort((a, b) => (a.label < b.label ? -1 : 1));
}

export function renderRefdist(runsFile: string, referenceFile: string): string {
  const series = refdistSeries(readFront(runsFile), readFront(referenceFile));
  const hs = series.flatMap((s) => s.points.map((p) => p.h));
  const dists = series.flatMap((s) => s.points.map((p) => p.dist));
  const positive = dists.filter((d) => d > 0);
  // exact matches sit at a visible floor rather than -infinity
  const floor = positive.length ? Math.min(...positive) / 10 : 1e-16;
  const shown = dists.map((d) => Math.max(d, floor));

  const doc = new SvgDoc(W, H);
  const f = frame(doc, extent(hs), extent(shown), true);
  drawAxes(doc, f, "h_max", "distance to reference", true, true);
  doc.text(W / 2, 14, "image-space distance to reference level", 'font-size="12" text-anchor="middle"');

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map((p) => `${f.x(p.h).toFixed(1)},${f.y(Math.max(p.dist, floor)).toFixed(1)}`);
    doc.add(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const p of s.points) {
      drawMarker(doc, markerFor(i), f.x(p.h), f.y(Math.max(p.dist, floor)), color, 3);
    }
    doc.text(W - 130, MARGIN.top + 10 + 14 * i, s.label, `font-size="10" fill="${color}"`);
  });
  return doc.render();
}

// ------------------------------------------------------------------ field

export interface FieldGrid {
  xs: number[];
  ys: number[];
  /** value[iy][ix] or NaN where no node exists */
  grid(values: (r: FieldRow) => number): number[][];
  rows: FieldRow[];
}

/** Reconstruct the structured node grid from coordinates. */
export function fieldGrid(rows: FieldRow[]): FieldGrid {
  const uniqSorted = (vals: number[]) => {
    const out = [...new Set(vals.map((v) => v.toFixed(12)))].map(Number);
    return out.sort((a, b) => a - b);
  };
  const xs = uniqSorted(rows.map((r) => r.x1));
  const ys = uniqSorted(rows.map((r) => r.x2));
  const ix = new Map(xs.map((v, i) => [v.toFixed(12), i]));
  const iy = new Map(ys.map((v, i) => [v.toFixed(12), i]));
  return {
    xs,
    ys,
    rows,
    grid(value) {
      const g = ys.map(() => xs.map(() => NaN));
      for (const r of rows) {
        g[iy.get(r.x2.toFixed(12))!][ix.get(r.x1.toFixed(12))!] = value(r);
      }
      return g;
    },
  };
}

export function renderField(fieldFile: string): string {
  const rows = readField(fieldFile);
  const g = fieldGrid(rows);
  const panels: Array<{ title: string; value: (r: FieldRow) => number; overlay: boolean }> = [
    { title: "control u", value: (r) => r.u, overlay: true },
    { title: "state y", value: (r) => r.y, overlay: true },
    { title: "obstacle psi", value: (r) => r.psi, overlay: false },
  ];
  const side = 240;
  const gap = 30;
  const doc = new SvgDoc(3 * side + 4 * gap, side + 70);

  panels.forEach((panel, pi) => {
    const x0 = gap + pi * (side + gap);
    const y0 = 40;
    const values = rows.map(panel.value);
    const [lo, hi] = extent(values);
    const span = hi - lo || 1;
    const grid = g.grid(panel.value);
    const cw = side / g.xs.length;
    const ch = side / g.ys.length;
    for (let iy = 0; iy < g.ys.length; iy++) {
      for (let ix = 0; ix < g.xs.length; ix++) {
        const v = grid[iy][ix];
        if (Number.isNaN(v)) continue;
        // flip y so the vertical axis points up
        const py = y0 + side - (iy + 1) * ch;
        doc.add(`<rect x="${(x0 + ix * cw).toFixed(1)}" y="${py.toFixed(1)}" width="${cw.toFixed(2)}" height="${ch.toFixed(2)}" fill="${heatColor((v - lo) / span)}"/>`);
      }
    }
    if (panel.overlay) {
      for (const r of rows) {
        if (!r.active) continue;
        const ix = g.xs.findIndex((v) => v.toFixed(12) === r.x1.toFixed(12));
        const iy = g.ys.findIndex((v) => v.toFixed(12) === r.x2.toFixed(12));
        const cx = x0 + (ix + 0.5) * cw;
        const cy = y0 + side - (iy + 0.5) * ch;
        doc.add(`<circle cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="${Math.min(cw, ch) / 5}" fill="none" stroke="black" stroke-width="1"/>`);
      }
    }
    doc.add(`<rect x="${x0}" y="${y0}" width="${side}" height="${side}" fill="none" stroke="#333"/>`);
    doc.text(x0 + side / 2, 24, panel.title, 'font-size="12" text-anchor="middle"');
    doc.text(x0, y0 + side + 16, `[${fmt(lo)}, ${fmt(hi)}]`, 'font-size="10"');
  });
  doc.text(gap, side + 64, "circles mark contact nodes", 'font-size="10"');
  return doc.render();
}

// ----------------------------------------------------------------- xisize

export function xisizeSeries(rows: TraceRow[]): Array<{ iter: number; size: number }> {
  return rows.map((r) => ({ iter: r.iter, size: r.xiSetSize }));
}

export function renderXisize(traceFile: string): string {
  const rows = readTrace(traceFile);
  const pts = xisizeSeries(rows);
  const doc = new SvgDoc(W, H);
  const sizes = pts.map((p) => p.size);
  const f = frame(doc, pad(extent(pts.map((p) => p.iter))), [0, Math.max(...sizes) + 1]);
  drawAxes(doc, f, "iteration", "subderivatives in final bundle");
  doc.text(W / 2, 14, "approximated subdifferential size per iteration", 'font-size="12" text-anchor="middle"');

  // step plot
  const path: string[] = [];
  pts.forEach((p, i) => {
    const x = f.x(p.iter);
    const y = f.y(p.size);
    if (i === 0) path.push(`M${x.toFixed(1)},${y.toFixed(1)}`);
    else path.push(`H${x.toFixed(1)}`, `V${y.toFixed(1)}`);
  });
  doc.add(`<path d="${path.join(" ")}" fill="none" stroke="${PALETTE[0]}" stroke-width="1.2"/>`);
  return doc.render();
}

// ------------------------------------------------------------------ entry

export type PlotKind = "front" | "refdist" | "field" | "xisize";

export function renderPlot(kind: PlotKind, inputs: string[]): string {
  switch (kind) {
    case "front":
      if (inputs.length !== 1) throw new CsvError("front needs exactly one input (front.csv)");
      return renderFront(inputs[0]);
    case "refdist":
      if (inputs.length !== 2) {
        throw new CsvError("refdist needs two inputs: runs front.csv and reference front.csv");
      }
      return renderRefdist(inputs[0], inputs[1]);
    case "field":
      if (inputs.length !== 1) throw new CsvError("field needs exactly one input (field_<id>.csv)");
      return renderField(inputs[0]);
    case "xisize":
      if (inputs.length !== 1) throw new CsvError("xisize needs exactly one input (trace_<id>.csv)");
      return renderXisize(inputs[0]);
  }
}
