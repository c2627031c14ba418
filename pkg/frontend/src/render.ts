/**
 * Panel rendering over the levy-epidemic file contract.
 *
 * `renderAll` expects a directory produced by
 * `levy-epidemic reproduce-figures` and emits one SVG per panel plus a
 * combined contact sheet. Missing inputs are collected and reported
 * exhaustively before anything is written.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { chartBody, chartSvg, sheetSvg } from "./chart";
import { parseTrajectoryCsv, parseVerdictsCsv, SeriesName, VerdictRow } from "./csv";

export class RenderError extends Error {}

export interface PanelSpec {
  csvPath: string;
  title: string;
  series: SeriesName[];
  outPath: string;
  subtitle?: string;
  markJumps?: boolean;
}

/** The six reference panels, in figure order. */
export const PANEL_LAYOUT: { name: string; series: SeriesName[]; title: string }[] = [
  { name: "fig1a", series: ["S", "I"], title: "SIS, negative jump integral" },
  { name: "fig1b", series: ["S", "I"], title: "SIS, positive jumps" },
  { name: "fig2a", series: ["S", "I"], title: "SIS epidemic, negative jump integral" },
  { name: "fig2b", series: ["S", "I"], title: "SIS epidemic, positive jumps" },
  { name: "fig3a", series: ["S", "I", "R"], title: "SIRS, disease-free convergence" },
  { name: "fig3b", series: ["S", "I", "R"], title: "SIRS epidemic" },
];

function loadChartOptions(spec: PanelSpec) {
  let text: string;
  try {
    text = fs.readFileSync(spec.csvPath, "utf-8");
  } catch {
    throw new RenderError(`missing CSV: ${spec.csvPath}`);
  }
  const trajectory = parseTrajectoryCsv(text, spec.csvPath);
  for (const name of spec.series) {
    if (!trajectory.series.includes(name)) {
      throw new RenderError(
        `${spec.csvPath}: series ${name} requested but CSV has [${trajectory.series}]`
      );
    }
  }
  return {
    trajectory,
    series: spec.series,
    title: spec.title,
    subtitle: spec.subtitle,
    markJumps: spec.markJumps,
  };
}

/** Render one panel CSV to an SVG file. */
export function renderPanel(spec: PanelSpec): string {
  const svg = chartSvg(loadChartOptions(spec));
  fs.mkdirSync(path.dirname(spec.outPath), { recursive: true });
  fs.writeFileSync(spec.outPath, svg, "utf-8");
  return spec.outPath;
}

function verdictSubtitles(inDir: string): Map<string, string> {
  const subtitles = new Map<string, string>();
  const verdictsPath = path.join(inDir, "verdicts.csv");
  if (!fs.existsSync(verdictsPath)) {
    return subtitles;
  }
  const rows: VerdictRow[] = parseVerdictsCsv(
    fs.readFileSync(verdictsPath, "utf-8"), verdictsPath);
  for (const row of rows) {
    subtitles.set(
      row.panel,
      `beta=${row.beta}, threshold=${row.threshold}, ` +
        `${row.holds ? "disease-free stable" : "epidemic"}`
    );
  }
  return subtitles;
}

/** Render all six panels plus the contact sheet; returns written paths. */
export function renderAll(inDir: string, outDir: string): string[] {
  const missing = PANEL_LAYOUT
    .map((p) => path.join(inDir, `${p.name}.csv`))
    .filter((file) => !fs.existsSync(file));
  if (missing.length > 0) {
    throw new RenderError(
      `missing ${missing.length} panel CSV(s):\n` + missing.join("\n")
    );
  }
  const subtitles = verdictSubtitles(inDir);
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const bodies: string[] = [];
  const failures: string[] = [];
  for (const layout of PANEL_LAYOUT) {
    const spec: PanelSpec = {
      csvPath: path.join(inDir, `${layout.name}.csv`),
      title: `${layout.name}: ${layout.title}`,
      series: layout.series,
      subtitle: subtitles.get(layout.name),
      outPath: path.join(outDir, `${layout.name}.svg`),
    };
    try {
      const options = loadChartOptions(spec);
      fs.writeFileSync(spec.outPath, chartSvg(options), "utf-8");
      written.push(spec.outPath);
      bodies.push(chartBody(options));
    } catch (err) {
      failures.push(err instanceof Error ? err.message : String(err));
    }
  }
  if (failures.length > 0) {
    throw new RenderError(`${failures.length} panel(s) failed:\n` + failures.join("\n"));
  }
  const sheetPath = path.join(outDir, "sheet.svg");
  fs.writeFileSync(sheetPath, sheetSvg(bodies, 2), "utf-8");
  written.push(sheetPath);
  return written;
}
