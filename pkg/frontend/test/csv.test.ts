import { describe, expect, it } from "vitest";

import { parseTrajectoryCsv, parseVerdictsCsv, SchemaError } from "../src/csv";

const SIS = "t,S,I,jumped\n0.000000,0.6,0.4,0\n0.500000,0.65,0.35,1\n";
const SIRS = "t,S,I,R,jumped\n0.000000,0.3,0.6,0.1,0\n1.000000,0.4,0.45,0.15,0\n";

describe("parseTrajectoryCsv", () => {
  it("parses the SIS schema", () => {
    const traj = parseTrajectoryCsv(SIS);
    expect(traj.series).toEqual(["S", "I"]);
    expect(traj.t).toEqual([0.0, 0.5]);
    expect(traj.values.S).toEqual([0.6, 0.65]);
    expect(traj.jumped).toEqual([0, 1]);
  });

  it("parses the SIRS schema", () => {
    const traj = parseTrajectoryCsv(SIRS);
    expect(traj.series).toEqual(["S", "I", "R"]);
    expect(traj.values.R).toEqual([0.1, 0.15]);
  });

  it("rejects a header missing the I column", () => {
    expect(() => parseTrajectoryCsv("t,S,jumped\n0,1,0\n")).toThrow(SchemaError);
  });

  it("rejects reordered headers", () => {
    expect(() => parseTrajectoryCsv("t,I,S,jumped\n0,0.4,0.6,0\n")).toThrow(
      SchemaError
    );
  });

  it("rejects ragged rows", () => {
    expect(() => parseTrajectoryCsv("t,S,I,jumped\n0,0.6,0\n")).toThrow(SchemaError);
  });

  it("rejects non-numeric fields", () => {
    expect(() => parseTrajectoryCsv("t,S,I,jumped\n0,x,0.4,0\n")).toThrow(
      SchemaError
    );
  });

  it("rejects jumped flags outside {0,1}", () => {
    expect(() => parseTrajectoryCsv("t,S,I,jumped\n0,0.6,0.4,2\n")).toThrow(
      SchemaError
    );
  });

  it("rejects empty input", () => {
    expect(() => parseTrajectoryCsv("")).toThrow(SchemaError);
    expect(() => parseTrajectoryCsv("t,S,I,jumped\n")).toThrow(SchemaError);
  });
});

describe("parseVerdictsCsv", () => {
  it("parses verdict rows", () => {
    const rows = parseVerdictsCsv(
      "panel,beta,threshold,holds\nfig1a,0.1,0.49,true\nfig2a,0.4,0.35,false\n"
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({ panel: "fig1a", beta: 0.1, threshold: 0.49, holds: true });
    expect(rows[1].holds).toBe(false);
  });

  it("rejects a wrong header", () => {
    expect(() => parseVerdictsCsv("a,b\n1,2\n")).toThrow(SchemaError);
  });
});
