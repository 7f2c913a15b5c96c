/**
 * L2-norm-vs-time figure from decay.csv (or report.csv, same columns).
 */

import { writeFileSync } from "fs";

import { column, readTable } from "./csv.js";
import { DEFAULT_MARGINS, Scene, scale } from "./svg.js";

export interface DecayPlotSpec {
  input: string;
  output: string;
  width?: number;
  height?: number;
  title?: string;
}

export interface DecayPlotResult {
  maxStepIncrease: number;
  svg: string;
}

export function plotDecay(spec: DecayPlotSpec): DecayPlotResult {
  const table = readTable(spec.input);
  if (table.rows.length < 2) {
    throw new Error(`need at least 2 rows to plot a time series, got ${table.rows.length}`);
  }
  const t = column(table, "t");
  const norm = column(table, "l2_norm");

  let maxStepIncrease = 0;
  for (let i = 1; i < norm.length; i++) {
    maxStepIncrease = Math.max(maxStepIncrease, norm[i] - norm[i - 1]);
  }

  const width = spec.width ?? 560;
  const height = spec.height ?? 420;
  const m = DEFAULT_MARGINS;
  const scene = new Scene(width, height);

  const t0 = Math.min(...t);
  const t1 = Math.max(...t);
  const lo = Math.min(...norm);
  const hi = Math.max(...norm);
  const pad = Math.max((hi - lo) * 0.08, hi * 0.02, 1e-12);
  const sx = scale(t0, t1, m.left, width - m.right);
  const sy = scale(lo - pad, hi + pad, height - m.bottom, m.top);

  scene.line(m.left, height - m.bottom, width - m.right, height - m.bottom, "#222", 1.5);
  scene.line(m.left, height - m.bottom, m.left, m.top, "#222", 1.5);
  const nticks = 5;
  for (let k = 0; k <= nticks; k++) {
    const tv = t0 + ((t1 - t0) * k) / nticks;
    scene.text(sx(tv), height - m.bottom + 16, tv.toPrecision(3), { anchor: "middle" });
    const nv = lo - pad + ((hi - lo + 2 * pad) * k) / nticks;
    scene.line(m.left, sy(nv), width - m.right, sy(nv), "#ddd");
    scene.text(m.left - 6, sy(nv) + 4, nv.toPrecision(3), { anchor: "end" });
  }

  scene.polyline(
    t.map((tv, i): [number, number] => [sx(tv), sy(norm[i])]),
    "#1f77b4",
  );
  scene.text(m.left + 10, m.top + 16, `max single-step increase ${maxStepIncrease.toExponential(2)}`);

  scene.text(width / 2, m.top - 16, spec.title ?? "L2 norm over time", {
    anchor: "middle",
    size: 14,
  });
  scene.text(width / 2, height - 12, "t", { anchor: "middle" });
  scene.text(16, height / 2, "||u||_L2", { anchor: "middle", rotate: true });

  const svg = scene.render();
  writeFileSync(spec.output, svg);
  return { maxStepIncrease, svg };
}
