/**
 * Figure assembly for the four CSV kinds produced by the optimizer CLI.
 * Rendering is read-only: no numeric transformation beyond the dB values
 * already present in the inputs.
 */

import { basename } from "node:path";
import {
  HeaderedCsv,
  SchemaError,
  numericColumn,
  readHeaderedCsv,
  requireColumns,
  requireSameScenario,
} from "./csv.js";
import { SERIES_COLORS, linearScale, ticks, viridis } from "./scales.js";
import { SvgDoc } from "./svg.js";

export type FigureKind = "heatmap" | "sr-curve" | "squint" | "runtime";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** fixed color-scale limits (dB) so cross-method heat maps compare */
  colorRange?: [number, number];
  labels?: string[];
  title?: string;
}

const MARGIN = { left: 60, right: 90, top: 34, bottom: 46 };
const PLOT_W = 480;
const PLOT_H = 360;

export function render(spec: FigureSpec): string {
  const inputs = spec.inputs.map(readHeaderedCsv);
  requireSameScenario(inputs);
  switch (spec.kind) {
    case "heatmap":
      if (inputs.length !== 1) throw new SchemaError("heatmap takes exactly one CSV");
      return renderHeatmap(inputs[0], spec);
    case "sr-curve":
      return renderCurves(inputs, spec, "freq_hz", "sr_min_bits",
        "frequency (GHz)", "worst-case secrecy rate (bits/symbol)", 1e-9);
    case "squint":
      return renderCurves(inputs, spec, "axis_value", "norm_snr_db",
        "array size / frequency", "normalized SNR (dB)", 1);
    case "runtime":
      return renderRuntime(inputs, spec);
    default:
      throw new SchemaError(`unknown figure kind ${spec.kind}`);
  }
}

function frame(doc: SvgDoc, xlab: string, ylab: string, title?: string): void {
  doc.rect(MARGIN.left, MARGIN.top, PLOT_W, PLOT_H,
    { fill: "none", stroke: "#333", "stroke-width": 1 });
  doc.text(MARGIN.left + PLOT_W / 2, MARGIN.top + PLOT_H + 36, xlab,
    { "text-anchor": "middle", "font-size": 13 });
  doc.raw(`<text x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" ` +
    `font-size="13" transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">${ylab}</text>`);
  if (title) {
    doc.text(MARGIN.left + PLOT_W / 2, 20, title,
      { "text-anchor": "middle", "font-size": 14 });
  }
}

function axes(doc: SvgDoc, xs: (v: number) => number, ys: (v: number) => number,
  xd: [number, number], yd: [number, number], xScaleDiv = 1): void {
  for (const t of ticks(xd[0], xd[1])) {
    const px = xs(t);
    doc.line(px, MARGIN.top + PLOT_H, px, MARGIN.top + PLOT_H + 5, { stroke: "#333" });
    doc.text(px, MARGIN.top + PLOT_H + 18, trimNum(t / xScaleDiv),
      { "text-anchor": "middle", "font-size": 11 });
  }
  for (const t of ticks(yd[0], yd[1])) {
    const py = ys(t);
    doc.line(MARGIN.left - 5, py, MARGIN.left, py, { stroke: "#333" });
    doc.text(MARGIN.left - 8, py + 4, trimNum(t),
      { "text-anchor": "end", "font-size": 11 });
  }
}

function trimNum(v: number): string {
  const s = v.toPrecision(6);
  return String(Number(s));
}

// --- heat map ---------------------------------------------------------------

function renderHeatmap(csv: HeaderedCsv, spec: FigureSpec): string {
  requireColumns(csv, ["x", "y", "snr_db"]);
  const nx = Number(csv.meta.nx);
  const ny = Number(csv.meta.ny);
  if (!Number.isFinite(nx) || !Number.isFinite(ny) || nx * ny !== csv.rows.length) {
    throw new SchemaError(
      `${csv.path}: header grid ${nx}x${ny} does not match ${csv.rows.length} rows`);
  }
  const xv = numericColumn(csv, "x");
  const yv = numericColumn(csv, "y");
  const zv = numericColumn(csv, "snr_db");
  const xd: [number, number] = [Math.min(...xv), Math.max(...xv)];
  const yd: [number, number] = [Math.min(...yv), Math.max(...yv)];
  const finite = zv.filter(Number.isFinite);
  const cr = spec.colorRange ??
    [Math.min(...finite), Math.max(...finite)] as [number, number];

  const doc = new SvgDoc(MARGIN.left + PLOT_W + MARGIN.right,
    MARGIN.top + PLOT_H + MARGIN.bottom);
  const xs = linearScale(xd, [MARGIN.left, MARGIN.left + PLOT_W]);
  const ys = linearScale(yd, [MARGIN.top + PLOT_H, MARGIN.top]);
  const cw = PLOT_W / nx;
  const chC = PLOT_H / ny;
  const cscale = linearScale(cr, [0, 1]);
  for (let i = 0; i < csv.rows.length; i++) {
    const vx = xs(xv[i]) - cw / 2;
    const vy = ys(yv[i]) - chC / 2;
    const color = Number.isFinite(zv[i]) ? viridis(cscale(zv[i])) : "#dddddd";
    doc.rect(vx, vy, cw + 0.5, chC + 0.5, { fill: color, class: "cell" });
  }
  // region overlays from the CSV metadata: green user box, red eavesdropper box
  for (const [key, color, cls] of [["user_rect", "#00c000", "user-region"],
                                   ["eve_rect", "#e00000", "eve-region"]] as const) {
    const rect = csv.meta[key] as number[] | undefined;
    if (rect && rect.length === 4) {
      const [x0, y0, x1, y1] = rect;
      doc.rect(xs(x0), ys(y1), xs(x1) - xs(x0), ys(y0) - ys(y1),
        { fill: "none", stroke: color, "stroke-width": 2.5, class: cls });
    }
  }
  frame(doc, "x (m)", "y (m)",
    spec.title ?? `SNR (dB) at ${(Number(csv.meta.freq_hz) / 1e9).toFixed(2)} GHz`);
  axes(doc, xs, ys, xd, yd);
  colorbar(doc, cr);
  return doc.toString();
}

function colorbar(doc: SvgDoc, cr: [number, number]): void {
  const x0 = MARGIN.left + PLOT_W + 18;
  const steps = 64;
  const h = PLOT_H / steps;
  for (let i = 0; i < steps; i++) {
    const t = (i + 0.5) / steps;
    doc.rect(x0, MARGIN.top + PLOT_H - (i + 1) * h, 14, h + 0.5,
      { fill: viridis(t), class: "colorbar" });
  }
  doc.text(x0 + 18, MARGIN.top + 10, trimNum(cr[1]), { "font-size": 11 });
  doc.text(x0 + 18, MARGIN.top + PLOT_H, trimNum(cr[0]), { "font-size": 11 });
}

// --- line charts --------------------------------------------------------------

function renderCurves(inputs: HeaderedCsv[], spec: FigureSpec, xcol: string,
  ycol: string, xlab: string, ylab: string, xdiv: number): string {
  for (const csv of inputs) requireColumns(csv, [xcol, ycol]);
  const series = inputs.map((csv) => ({
    x: numericColumn(csv, xcol),
    y: numericColumn(csv, ycol),
    label: labelOf(csv, spec, inputs.indexOf(csv)),
  }));
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y).filter(Number.isFinite);
  const xd: [number, number] = [Math.min(...allX), Math.max(...allX)];
  const pad = (Math.max(...allY) - Math.min(...allY)) * 0.05 || 0.5;
  const yd: [number, number] = [Math.min(...allY) - pad, Math.max(...allY) + pad];

  const doc = new SvgDoc(MARGIN.left + PLOT_W + MARGIN.right,
    MARGIN.top + PLOT_H + MARGIN.bottom);
  const xs = linearScale(xd, [MARGIN.left, MARGIN.left + PLOT_W]);
  const ys = linearScale(yd, [MARGIN.top + PLOT_H, MARGIN.top]);
  series.forEach((s, si) => {
    const pts = s.x.map((v, i) => [xs(v), ys(s.y[i])] as [number, number])
      .filter(([, py]) => Number.isFinite(py));
    doc.polyline(pts, { stroke: SERIES_COLORS[si % SERIES_COLORS.length],
      "stroke-width": 2, class: "series" });
    doc.text(MARGIN.left + PLOT_W + 18, MARGIN.top + 16 + 16 * si, s.label,
      { "font-size": 12, fill: SERIES_COLORS[si % SERIES_COLORS.length],
        class: "legend" });
  });
  frame(doc, xlab, ylab, spec.title);
  axes(doc, xs, ys, xd, yd, xdiv);
  return doc.toString();
}

function labelOf(csv: HeaderedCsv, spec: FigureSpec, i: number): string {
  if (spec.labels && spec.labels[i]) return spec.labels[i];
  return basename(csv.path).replace(/\.csv$/, "");
}

// --- runtime (log-log) ----------------------------------------------------------

function renderRuntime(inputs: HeaderedCsv[], spec: FigureSpec): string {
  for (const csv of inputs) requireColumns(csv, ["n", "seconds"]);
  const series = inputs.map((csv, i) => ({
    x: numericColumn(csv, "n").map(Math.log10),
    y: numericColumn(csv, "seconds").map(Math.log10),
    label: labelOf(csv, spec, i),
  }));
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  const xd: [number, number] = [Math.min(...allX), Math.max(...allX)];
  const yd: [number, number] = [Math.min(...allY) - 0.1, Math.max(...allY) + 0.1];
  const doc = new SvgDoc(MARGIN.left + PLOT_W + MARGIN.right,
    MARGIN.top + PLOT_H + MARGIN.bottom);
  const xs = linearScale(xd, [MARGIN.left, MARGIN.left + PLOT_W]);
  const ys = linearScale(yd, [MARGIN.top + PLOT_H, MARGIN.top]);
  series.forEach((s, si) => {
    doc.polyline(s.x.map((v, i) => [xs(v), ys(s.y[i])] as [number, number]),
      { stroke: SERIES_COLORS[si % SERIES_COLORS.length], "stroke-width": 2,
        class: "series" });
    doc.text(MARGIN.left + PLOT_W + 18, MARGIN.top + 16 + 16 * si, s.label,
      { "font-size": 12, class: "legend" });
  });
  frame(doc, "log10 N", "log10 seconds", spec.title ?? "runtime scaling");
  axes(doc, xs, ys, xd, yd);
  return doc.toString();
}
