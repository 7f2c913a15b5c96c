/**
 * Log-log convergence figure from convergence.csv.
 *
 * Plots the L1 and Linf errors against the mesh width h, adds a green
 * reference line of configurable slope (default 1, the expected order), and
 * prints the least-squares fitted slope of each error series in the legend.
 */

import { writeFileSync } from "fs";

import { column, readTable } from "./csv.js";
import { DEFAULT_MARGINS, Scene, decadeTicks, fitSlope, scale } from "./svg.js";

export interface ConvergencePlotSpec {
  input: string;
  output: string;
  refSlope?: number;
  width?: number;
  height?: number;
  title?: string;
}

export interface ConvergencePlotResult {
  l1Slope: number;
  linfSlope: number;
  svg: string;
}

const SERIES = [
  { name: "L1", color: "#1f77b4" },
  { name: "Linf", color: "#ff7f0e" },
] as const;

export function plotConvergence(spec: ConvergencePlotSpec): ConvergencePlotResult {
  const table = readTable(spec.input);
  if (table.rows.length < 2) {
    throw new Error(`need at least 2 rows to plot convergence, got ${table.rows.length}`);
  }
  const h = column(table, "h");
  const series = SERIES.map((s) => ({ ...s, values: column(table, s.name) }));
  const refSlope = spec.refSlope ?? 1;

  const logH = h.map(Math.log);
  const slopes = series.map((s) => fitSlope(logH, s.values.map(Math.log)));

  const width = spec.width ?? 560;
  const height = spec.height ?? 420;
  const m = DEFAULT_MARGINS;
  const scene = new Scene(width, height);

  // data extent in log10 space, padded a little
  const all = series.flatMap((s) => s.values);
  const x0 = Math.log10(Math.min(...h)) - 0.1;
  const x1 = Math.log10(Math.max(...h)) + 0.1;
  let y0 = Math.log10(Math.min(...all)) - 0.2;
  let y1 = Math.log10(Math.max(...all)) + 0.2;
  if (y1 - y0 < 0.5) {
    y0 -= 0.25;
    y1 += 0.25;
  }
  const sx = scale(x0, x1, m.left, width - m.right);
  const sy = scale(y0, y1, height - m.bottom, m.top);

  frame(scene, width, height);
  for (const t of decadeTicks(Math.pow(10, x0), Math.pow(10, x1))) {
    const px = sx(Math.log10(t));
    if (px < m.left - 1 || px > width - m.right + 1) continue;
    scene.line(px, height - m.bottom, px, m.top, "#ddd");
    scene.text(px, height - m.bottom + 16, tickLabel(t), { anchor: "middle" });
  }
  for (const t of decadeTicks(Math.pow(10, y0), Math.pow(10, y1))) {
    const py = sy(Math.log10(t));
    if (py < m.top - 1 || py > height - m.bottom + 1) continue;
    scene.line(m.left, py, width - m.right, py, "#ddd");
    scene.text(m.left - 6, py + 4, tickLabel(t), { anchor: "end" });
  }

  // the reference line passes through the first point of the first series,
  // shifted down for readability
  const anchorX = logH[0];
  const anchorY = Math.log(series[0].values[0]) - 0.35;
  const ref = [Math.min(...logH), Math.max(...logH)].map((lx): [number, number] => [
    sx(lx / Math.LN10),
    sy((anchorY + refSlope * (lx - anchorX)) / Math.LN10),
  ]);
  scene.polyline(ref, "#2ca02c", 2);

  for (const [k, s] of series.entries()) {
    const pts = logH.map((lx, i): [number, number] => [
      sx(lx / Math.LN10),
      sy(Math.log10(s.values[i])),
    ]);
    scene.polyline(pts, s.color);
    for (const [px, py] of pts) scene.circle(px, py, 3.2, s.color);
    scene.text(m.left + 10, m.top + 16 + 16 * k, `${s.name} (slope ${slopes[k].toFixed(3)})`, {
      fill: s.color,
    });
  }
  scene.text(m.left + 10, m.top + 16 + 16 * series.length, `reference slope ${refSlope}`, {
    fill: "#2ca02c",
  });

  scene.text(width / 2, m.top - 16, spec.title ?? "Error vs mesh width", {
    anchor: "middle",
    size: 14,
  });
  scene.text(width / 2, height - 12, "h", { anchor: "middle" });
  scene.text(16, height / 2, "error", { anchor: "middle", rotate: true });

  const svg = scene.render();
  writeFileSync(spec.output, svg);
  return { l1Slope: slopes[0], linfSlope: slopes[1], svg };
}

function frame(scene: Scene, width: number, height: number): void {
  const m = DEFAULT_MARGINS;
  scene.line(m.left, height - m.bottom, width - m.right, height - m.bottom, "#222", 1.5);
  scene.line(m.left, height - m.bottom, m.left, m.top, "#222", 1.5);
}

function tickLabel(v: number): string {
  const e = Math.round(Math.log10(v));
  return e >= -2 && e <= 2 ? String(v) : `1e${e}`;
}
