/** Minimal SVG scene building: scales, axes, markers, a sequential colormap. */

export interface Scale {
  (v: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const f = ((v: number) => range[0] + ((v - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  f.domain = [d0, d1];
  f.ticks = () => {
    const span = d1 - d0;
    const raw = span / 5;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 6) ?? 10 * mag;
    const start = Math.ceil(d0 / step) * step;
    const out: number[] = [];
    for (let v = start; v <= d1 + 1e-12 * span; v += step) out.push(v);
    return out;
  };
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const lin = linearScale(lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi], range);
  const f = ((v: number) => lin(Math.log10(v))) as Scale;
  f.domain = domain;
  f.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(lin.domain[0]); e <= Math.floor(lin.domain[1]); e++) {
      out.push(Math.pow(10, e));
    }
    if (out.length === 0) out.push(domain[0], domain[1]);
    return out;
  };
  return f;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Math.round(v * 1e6) / 1e6);
}

export const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export class SvgDoc {
  private parts: string[] = [];
  constructor(readonly width: number, readonly height: number) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  text(x: number, y: number, s: string, opts = ""): void {
    this.add(`<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" font-family="sans-serif" ${opts}>${esc(s)}</text>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#000", width = 1): void {
    this.add(`<line x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export interface Frame {
  x: Scale;
  y: Scale;
  left: number;
  top: number;
  right: number;
  bottom: number;
}

/** Draw a framed axis box with tick marks and labels. */
export function drawAxes(
  doc: SvgDoc,
  frame: Frame,
  xLabel: string,
  yLabel: string,
  logTicksX = false,
  logTicksY = false,
): void {
  const { x, y, left, top, right, bottom } = frame;
  doc.add(`<rect x="${left}" y="${top}" width="${right - left}" height="${bottom - top}" fill="none" stroke="#333"/>`);
  for (const t of x.ticks()) {
    const px = x(t);
    doc.line(px, bottom, px, bottom + 4, "#333");
    doc.text(px, bottom + 16, logTicksX ? `1e${Math.round(Math.log10(t))}` : fmt(t),
      'font-size="10" text-anchor="middle"');
  }
  for (const t of y.ticks()) {
    const py = y(t);
    doc.line(left - 4, py, left, py, "#333");
    doc.text(left - 6, py + 3, logTicksY ? `1e${Math.round(Math.log10(t))}` : fmt(t),
      'font-size="10" text-anchor="end"');
  }
  doc.text((left + right) / 2, bottom + 32, xLabel, 'font-size="12" text-anchor="middle"');
  doc.add(`<text x="14" y="${(top + bottom) / 2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 ${(top + bottom) / 2})">${esc(yLabel)}</text>`);
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

const MARKERS = ["circle", "square", "triangle", "diamond", "plus", "cross"] as const;
export type MarkerKind = (typeof MARKERS)[number];

export function markerFor(i: number): MarkerKind {
  return MARKERS[i % MARKERS.length];
}

export function drawMarker(doc: SvgDoc, kind: MarkerKind, x: number, y: number, color: string, s = 4): void {
  const a = s.toFixed(1);
  switch (kind) {
    case "circle":
      doc.add(`<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${a}" fill="${color}"/>`);
      break;
    case "square":
      doc.add(`<rect x="${(x - s).toFixed(1)}" y="${(y - s).toFixed(1)}" width="${2 * s}" height="${2 * s}" fill="${color}"/>`);
      break;
    case "triangle":
      doc.add(`<polygon points="${x},${y - s} ${x - s},${y + s} ${x + s},${y + s}" fill="${color}"/>`);
      break;
    case "diamond":
      doc.add(`<polygon points="${x},${y - s} ${x - s},${y} ${x},${y + s} ${x + s},${y}" fill="${color}"/>`);
      break;
    case "plus":
      doc.line(x - s, y, x + s, y, color, 2);
      doc.line(x, y - s, x, y + s, color, 2);
      break;
    case "cross":
      doc.line(x - s, y - s, x + s, y + s, color, 2);
      doc.line(x - s, y + s, x + s, y - s, color, 2);
      break;
  }
}

// five-anchor approximation of a perceptually ordered colormap
const STOPS: Array<[number, number, number]> = [
  [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
];

export function heatColor(t: number): string {
  const v = Math.min(1, Math.max(0, t)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(v));
  const w = v - i;
  const c = STOPS[i].map((a, k) => Math.round(a + w * (STOPS[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}
