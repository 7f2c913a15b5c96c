import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { plotDecay } from "../src/decay.js";

function tmpFile(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "dodcut-plots-")), name);
}

function writeSeries(values: number[]): string {
  const path = tmpFile("decay.csv");
  const lines = ["step,t,l2_norm", ...values.map((v, k) => `${k},${k * 0.02},${v}`)];
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

function firstPolyline(svg: string): Array<[number, number]> {
  const m = svg.match(/<polyline points="([^"]+)"/);
  expect(m).not.toBeNull();
  return m![1].split(" ").map((pair) => {
    const [x, y] = pair.split(",").map(Number);
    return [x, y] as [number, number];
  });
}

describe("plotDecay", () => {
  it("renders a constant series as a horizontal line", () => {
    const input = writeSeries([1.0, 1.0, 1.0, 1.0]);
    const output = tmpFile("decay.svg");
    const res = plotDecay({ input, output });
    expect(res.maxStepIncrease).toBe(0);
    const pts = firstPolyline(readFileSync(output, "utf-8"));
    const ys = pts.map(([, y]) => y);
    expect(Math.max(...ys) - Math.min(...ys)).toBeLessThan(1e-9);
  });

  it("renders a decaying series with monotone pixel coordinates", () => {
    const input = writeSeries([1.0, 0.9, 0.82, 0.75, 0.7]);
    const output = tmpFile("decay.svg");
    const res = plotDecay({ input, output });
    expect(res.maxStepIncrease).toBe(0);
    const pts = firstPolyline(readFileSync(output, "utf-8"));
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i][1]).toBeGreaterThan(pts[i - 1][1]); // svg y grows downward
      expect(pts[i][0]).toBeGreaterThan(pts[i - 1][0]);
    }
  });

  it("reports the worst single-step increase", () => {
    const input = writeSeries([1.0, 0.9, 0.95, 0.85]);
    const res = plotDecay({ input, output: tmpFile("decay.svg") });
    expect(res.maxStepIncrease).toBeCloseTo(0.05, 12);
  });

  it("fails on a missing file", () => {
    expect(() => plotDecay({ input: "/nonexistent/decay.csv", output: tmpFile("o.svg") })).toThrow(
      /cannot read/,
    );
  });
});

describe("cli", () => {
  it("runs both commands end to end", () => {
    const decayCsv = writeSeries([1.0, 0.95, 0.9]);
    expect(main(["decay", "--input", decayCsv, "--output", tmpFile("d.svg")])).toBe(0);
    const convCsv = tmpFile("c.csv");
    writeFileSync(
      convCsv,
      "N,h,dt,L1,Linf,order_L1,order_Linf\n8,0.125,0.05,0.2,0.3,,\n16,0.0625,0.025,0.1,0.15,1,1\n",
    );
    expect(main(["convergence", "--input", convCsv, "--output", tmpFile("c.svg")])).toBe(0);
  });

  it("returns nonzero on bad usage", () => {
    expect(main([])).toBe(1);
    expect(main(["convergence", "--input", "x.csv"])).toBe(1);
    expect(main(["wat", "--input", "a", "--output", "b"])).toBe(1);
  });
});
