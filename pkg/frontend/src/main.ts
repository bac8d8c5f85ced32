/**
 * CLI: render solver CSV artifacts as SVG figures.
 *
 *   node dist/main.js convergence --out fig.svg history1.csv [history2.csv ...]
 *   node dist/main.js radii       --out fig.svg radii.csv
 *
 * Exit codes: 0 success, 1 usage error, 2 schema/data error.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { SchemaError } from "./csv.js";
import { NamedCsv, renderConvergenceFigure, renderRadiiFigure } from "./plot.js";

function usage(): never {
  console.error(
    "usage: main.js <convergence|radii> --out <figure.svg> <input.csv> [more.csv ...]",
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  const [kind, ...rest] = argv;
  if (kind !== "convergence" && kind !== "radii") usage();
  let out: string | null = null;
  const inputs: string[] = [];
  for (let i = 0; i < rest.length; i += 1) {
    if (rest[i] === "--out") {
      out = rest[i + 1] ?? null;
      i += 1;
    } else {
      inputs.push(rest[i]!);
    }
  }
  if (!out || inputs.length === 0) usage();

  let files: NamedCsv[];
  try {
    files = inputs.map((path) => ({ path, text: readFileSync(path, "utf8") }));
  } catch (error) {
    console.error(`cannot read input: ${(error as Error).message}`);
    return 2;
  }
  try {
    const svg =
      kind === "convergence" ? renderConvergenceFigure(files) : renderRadiiFigure(files);
    mkdirSync(dirname(out), { recursive: true });
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (error) {
    const prefix = error instanceof SchemaError ? "schema error" : "cannot render";
    console.error(`${prefix}: ${(error as Error).message}`);
    return 2;
  }
}

process.exit(main(process.argv.slice(2)));
