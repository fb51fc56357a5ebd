#!/usr/bin/env node
/**
 * plot <kind> --in <paths...> --out <file.svg>
 *
 * Kinds: front, refdist (runs + reference front.csv), field, xisize.
 * The SVG is fully rendered before the output file is touched, so a
 * failing run leaves nothing behind.
 */

import { writeFileSync } from "fs";
import { CsvError } from "./csv.js";
import { PlotKind, renderPlot } from "./plots.js";

const KINDS = ["front", "refdist", "field", "xisize"];

function usage(): string {
  return [
    "usage: plot <kind> --in <csv> [<csv>] --out <file.svg>",
    `  kinds: ${KINDS.join(", ")}`,
    "  refdist takes two --in paths: the runs front.csv, then the reference front.csv",
  ].join("\n");
}

export function main(argv: string[]): number {
  const args = [...argv];
  const kind = args.shift();
  if (kind === undefined || kind === "-h" || kind === "--help") {
    console.log(usage());
    return kind === undefined ? 2 : 0;
  }
  if (!KINDS.includes(kind)) {
    console.error(`error: unknown plot kind '${kind}'\n${usage()}`);
    return 2;
  }
  const inputs: string[] = [];
  let out: string | undefined;
  while (args.length > 0) {
    const a = args.shift()!;
    if (a === "--in") {
      while (args.length > 0 && !args[0].startsWith("--")) inputs.push(args.shift()!);
    } else if (a === "--out") {
      out = args.shift();
    } else {
      console.error(`error: unexpected argument '${a}'\n${usage()}`);
      return 2;
    }
  }
  if (inputs.length === 0 || out === undefined) {
    console.error(`error: --in and --out are required\n${usage()}`);
    return 2;
  }
  try {
    const svg = renderPlot(kind as PlotKind, inputs);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
