/**
 * Parsing and validation of levy-epidemic trajectory CSVs.
 *
 * The published contract is a header row of exactly `t,S,I,jumped`
 * (SIS) or `t,S,I,R,jumped` (SIRS), followed by numeric rows with
 * `jumped` in {0,1}. Numbers are passed through untouched: no
 * smoothing, no resampling.
 */

export class SchemaError extends Error {}

export type SeriesName = "S" | "I" | "R";

export interface Trajectory {
  /** Column names as found in the header, e.g. ["S","I"] or ["S","I","R"]. */
  series: SeriesName[];
  t: number[];
  values: Record<string, number[]>;
  jumped: number[];
}

const SIS_HEADER = "t,S,I,jumped";
const SIRS_HEADER = "t,S,I,R,jumped";

export function parseTrajectoryCsv(text: string, source = "<csv>"): Trajectory {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty CSV`);
  }
  const header = lines[0];
  let series: SeriesName[];
  if (header === SIS_HEADER) {
    series = ["S", "I"];
  } else if (header === SIRS_HEADER) {
    series = ["S", "I", "R"];
  } else {
    throw new SchemaError(
      `${source}: header "${header}" is neither "${SIS_HEADER}" nor "${SIRS_HEADER}"`
    );
  }
  const width = series.length + 2;
  const t: number[] = [];
  const jumped: number[] = [];
  const values: Record<string, number[]> = {};
  for (const name of series) {
    values[name] = [];
  }
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== width) {
      throw new SchemaError(
        `${source}: row ${i + 1} has ${fields.length} fields, expected ${width}`
      );
    }
    const numbers = fields.map(Number);
    if (numbers.some((v) => Number.isNaN(v))) {
      throw new SchemaError(`${source}: row ${i + 1} contains a non-numeric field`);
    }
    const flag = numbers[width - 1];
    if (flag !== 0 && flag !== 1) {
      throw new SchemaError(`${source}: row ${i + 1} jumped flag must be 0 or 1`);
    }
    t.push(numbers[0]);
    series.forEach((name, k) => values[name].push(numbers[k + 1]));
    jumped.push(flag);
  }
  if (t.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return { series, t, values, jumped };
}

export interface VerdictRow {
  panel: string;
  beta: number;
  threshold: number;
  holds: boolean;
}

export function parseVerdictsCsv(text: string, source = "<csv>"): VerdictRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== "panel,beta,threshold,holds") {
    throw new SchemaError(`${source}: expected header "panel,beta,threshold,holds"`);
  }
  return lines.slice(1).map((line, i) => {
    const fields = line.split(",");
    if (fields.length !== 4 || !["true", "false"].includes(fields[3])) {
      throw new SchemaError(`${source}: bad verdict row ${i + 2}`);
    }
    return {
      panel: fields[0],
      beta: Number(fields[1]),
      threshold: Number(fields[2]),
      holds: fields[3] === "true",
    };
  });
}
