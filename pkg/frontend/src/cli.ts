#!/usr/bin/env node
/**
 * plots render --in <dir> --out <dir>
 *
 * Renders the levy-epidemic reproduce-figures outputs (six trajectory
 * CSVs, optional verdicts.csv) into SVG panels and a contact sheet.
 */

import { renderAll, RenderError } from "./render";

function usage(): never {
  console.error("usage: plots render --in <dir> --out <dir>");
  process.exit(1);
}

export function main(argv: string[]): number {
  if (argv.length === 0 || argv[0] !== "render") {
    usage();
  }
  let inDir: string | undefined;
  let outDir: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) usage();
    if (flag === "--in") inDir = value;
    else if (flag === "--out") outDir = value;
    else usage();
  }
  if (!inDir || !outDir) usage();
  try {
    const written = renderAll(inDir, outDir);
    for (const file of written) {
      console.log(file);
    }
    return 0;
  } catch (err) {
    if (err instanceof RenderError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
