/**
 * Deterministic SVG line charts for compartment-frequency trajectories.
 *
 * Charts are built as plain SVG strings with fixed number formatting,
 * so identical inputs produce byte-identical files.
 */

import { Trajectory, SeriesName } from "./csv";

export const PANEL_WIDTH = 640;
export const PANEL_HEIGHT = 400;

const MARGIN = { top: 44, right: 20, bottom: 44, left: 56 };
const COLORS: Record<SeriesName, string> = {
  S: "#1f77b4",
  I: "#d62728",
  R: "#2ca02c",
};

export interface ChartOptions {
  trajectory: Trajectory;
  series: SeriesName[];
  title: string;
  subtitle?: string;
  markJumps?: boolean;
}

function fmt(v: number): string {
  return v.toFixed(2);
}

/** Inner markup of one chart (no <svg> wrapper), for reuse in sheets. */
export function chartBody(opts: ChartOptions): string {
  const { trajectory, series, title, subtitle, markJumps = true } = opts;
  const w = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const h = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const tMax = trajectory.t[trajectory.t.length - 1] || 1;
  const x = (t: number) => MARGIN.left + (t / tMax) * w;
  const y = (v: number) => MARGIN.top + (1 - v) * h;

  const parts: string[] = [];
  parts.push(
    `<rect x="0" y="0" width="${PANEL_WIDTH}" height="${PANEL_HEIGHT}" fill="#ffffff"/>`
  );
  parts.push(
    `<text x="${PANEL_WIDTH / 2}" y="20" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="14" font-weight="bold">${escapeXml(title)}</text>`
  );
  if (subtitle) {
    parts.push(
      `<text x="${PANEL_WIDTH / 2}" y="36" text-anchor="middle" ` +
        `font-family="sans-serif" font-size="11" fill="#555555">${escapeXml(subtitle)}</text>`
    );
  }

  // axes and ticks
  parts.push(
    `<line x1="${MARGIN.left}" y1="${y(0)}" x2="${x(tMax)}" y2="${y(0)}" stroke="#000000"/>`,
    `<line x1="${MARGIN.left}" y1="${y(0)}" x2="${MARGIN.left}" y2="${y(1)}" stroke="#000000"/>`
  );
  for (let i = 0; i <= 4; i++) {
    const v = i / 4;
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${fmt(y(v))}" x2="${MARGIN.left}" y2="${fmt(y(v))}" stroke="#000000"/>`,
      `<line x1="${MARGIN.left}" y1="${fmt(y(v))}" x2="${x(tMax)}" y2="${fmt(y(v))}" stroke="#dddddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y(v) + 4)}" text-anchor="end" ` +
        `font-family="sans-serif" font-size="11">${v.toFixed(2)}</text>`
    );
  }
  for (let i = 0; i <= 5; i++) {
    const t = (tMax * i) / 5;
    parts.push(
      `<line x1="${fmt(x(t))}" y1="${y(0)}" x2="${fmt(x(t))}" y2="${y(0) + 4}" stroke="#000000"/>`,
      `<text x="${fmt(x(t))}" y="${y(0) + 18}" text-anchor="middle" ` +
        `font-family="sans-serif" font-size="11">${t.toFixed(0)}</text>`
    );
  }
  parts.push(
    `<text x="${MARGIN.left + w / 2}" y="${PANEL_HEIGHT - 8}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="12">t (days)</text>`,
    `<text x="16" y="${MARGIN.top + h / 2}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${MARGIN.top + h / 2})">frequency</text>`
  );

  // series polylines, one vertex per CSV row
  for (const name of series) {
    const points = trajectory.t
      .map((t, i) => `${fmt(x(t))},${fmt(y(trajectory.values[name][i]))}`)
      .join(" ");
    parts.push(
      `<polyline class="series-${name}" fill="none" stroke="${COLORS[name]}" ` +
        `stroke-width="1.4" points="${points}"/>`
    );
  }

  // jump markers on the infected series
  if (markJumps && series.includes("I")) {
    for (let i = 0; i < trajectory.t.length; i++) {
      if (trajectory.jumped[i] === 1) {
        parts.push(
          `<circle class="jump-mark" cx="${fmt(x(trajectory.t[i]))}" ` +
            `cy="${fmt(y(trajectory.values.I[i]))}" r="1.6" fill="#d62728" fill-opacity="0.5"/>`
        );
      }
    }
  }

  // legend
  series.forEach((name, k) => {
    const lx = MARGIN.left + 12 + 64 * k;
    parts.push(
      `<line x1="${lx}" y1="${MARGIN.top + 10}" x2="${lx + 18}" y2="${MARGIN.top + 10}" ` +
        `stroke="${COLORS[name]}" stroke-width="2"/>`,
      `<text x="${lx + 24}" y="${MARGIN.top + 14}" font-family="sans-serif" ` +
        `font-size="12">${name}</text>`
    );
  });
  return parts.join("\n");
}

export function chartSvg(opts: ChartOptions): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_WIDTH}" ` +
    `height="${PANEL_HEIGHT}" viewBox="0 0 ${PANEL_WIDTH} ${PANEL_HEIGHT}">\n` +
    chartBody(opts) +
    "\n</svg>\n"
  );
}

/** Arrange prebuilt chart bodies on a grid into one contact sheet. */
export function sheetSvg(bodies: string[], columns: number): string {
  const rows = Math.ceil(bodies.length / columns);
  const width = columns * PANEL_WIDTH;
  const height = rows * PANEL_HEIGHT;
  const groups = bodies.map((body, i) => {
    const tx = (i % columns) * PANEL_WIDTH;
    const ty = Math.floor(i / columns) * PANEL_HEIGHT;
    return `<g transform="translate(${tx} ${ty})">\n${body}\n</g>`;
  });
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    groups.join("\n") +
    "\n</svg>\n"
  );
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
