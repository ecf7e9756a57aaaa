import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  SchemaError,
  TRACE_COLUMNS,
  detectKind,
  parsePtpCsv,
  parseTraceCsv,
} from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");
const trace = readFileSync(join(FIXTURES, "trace_2s.csv"), "utf8");
const ptp = readFileSync(join(FIXTURES, "ptp.csv"), "utf8");

describe("trace CSV parsing", () => {
  it("parses every column of a simulator trace", () => {
    const rows = parseTraceCsv(trace);
    expect(rows.length).toBe(8);
    expect(rows[0].step_index).toBe(0);
    expect(rows[0].step_s).toBe(2);
    expect(rows[rows.length - 1].sim_time_s).toBe(16);
    for (const col of TRACE_COLUMNS) {
      expect(typeof rows[0][col]).toBe("number");
    }
  });

  it("rejects a missing column by name", () => {
    const broken = trace
      .split("\n")
      .map((line) => line.split(",").slice(0, -1).join(","))
      .join("\n");
    let caught: unknown;
    try {
      parseTraceCsv(broken);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(SchemaError);
    expect((caught as SchemaError).column).toBe("n_filtered");
    expect((caught as SchemaError).message).toContain("n_filtered");
  });

  it("rejects non-numeric cells by column name", () => {
    const lines = trace.split("\n");
    lines[1] = lines[1].replace("2.0", "soon");
    expect(() => parseTraceCsv(lines.join("\n"))).toThrowError(SchemaError);
  });

  it("accepts nan cells from failed estimator steps", () => {
    const lines = trace.trim().split("\n");
    const cells = lines[1].split(",");
    cells[7] = "nan"; // alpha_hat
    const rows = parseTraceCsv([lines[0], cells.join(",")].join("\n"));
    expect(Number.isNaN(rows[0].alpha_hat)).toBe(true);
  });

  it("parses a header-only file to zero rows", () => {
    const rows = parseTraceCsv(trace.split("\n")[0] + "\n");
    expect(rows).toEqual([]);
  });
});

describe("ptp CSV parsing", () => {
  it("parses analyze-ptp output", () => {
    const rows = parsePtpCsv(ptp);
    expect(rows.length).toBe(30);
    expect(rows[0].path_delay_ns).toBe(800);
    expect(rows[0].servo_state).toBe(2);
  });
});

describe("input kind detection", () => {
  it("distinguishes trace and ptp headers", () => {
    expect(detectKind(trace)).toBe("trace");
    expect(detectKind(ptp)).toBe("ptp");
    expect(() => detectKind("a,b,c\n1,2,3\n")).toThrowError(SchemaError);
  });
});
