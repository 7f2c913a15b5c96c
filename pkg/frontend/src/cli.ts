/**
 * Plotting CLI: CSV in, SVG out.
 *
 * Usage:
 *   node dist/cli.js convergence --input convergence.csv --output convergence.svg [--ref-slope 1]
 *   node dist/cli.js decay --input decay.csv --output decay.svg
 */

import { plotConvergence } from "./convergence.js";
import { plotDecay } from "./decay.js";

interface Args {
  command: string;
  input?: string;
  output?: string;
  refSlope: number;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new Error("usage: convergence|decay --input <csv> --output <svg> [--ref-slope r]");
  }
  const args: Args = { command: argv[0], refSlope: 1 };
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${key}`);
    if (key === "--input") args.input = value;
    else if (key === "--output") args.output = value;
    else if (key === "--ref-slope") args.refSlope = Number(value);
    else throw new Error(`unknown option ${key}`);
  }
  if (!args.input || !args.output) throw new Error("--input and --output are required");
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (args.command === "convergence") {
      const res = plotConvergence({ input: args.input!, output: args.output!, refSlope: args.refSlope });
      console.log(
        `wrote ${args.output} (L1 slope ${res.l1Slope.toFixed(3)}, Linf slope ${res.linfSlope.toFixed(3)})`,
      );
    } else if (args.command === "decay") {
      const res = plotDecay({ input: args.input!, output: args.output! });
      console.log(`wrote ${args.output} (max step increase ${res.maxStepIncrease.toExponential(2)})`);
    } else {
      throw new Error(`unknown command ${args.command}`);
    }
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
