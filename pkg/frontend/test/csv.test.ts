import { describe, expect, it } from "vitest";

import { CsvError, parseSweepCsv, REQUIRED_COLUMNS } from "../src/csv.js";

const HEADER = REQUIRED_COLUMNS.join(",");

function row(overrides: Partial<Record<string, string>> = {}): string {
  const cells: Record<string, string> = {
    snr_db: "0.0",
    num_relays: "5",
    scheme: "proposed",
    trials: "1000",
    seed: "7",
    mean_delay: "2.8",
    delay_stderr: "0.003",
    throughput: "0.36",
    throughput_stderr: "0.0004",
    feasibility_rate: "0.997",
    analytic_delay: "2.801",
    analytic_throughput: "0.361",
    ...overrides,
  };
  return REQUIRED_COLUMNS.map((c) => cells[c]).join(",");
}

describe("parseSweepCsv", () => {
  it("parses a well-formed sweep", () => {
    const rows = parseSweepCsv(`${HEADER}\n${row()}\n${row({ scheme: "fdfr", analytic_delay: "", analytic_throughput: "" })}\n`);
    expect(rows).toHaveLength(2);
    expect(rows[0].mean_delay).toBe(2.8);
    expect(rows[0].analytic_delay).toBe(2.801);
    expect(rows[1].scheme).toBe("fdfr");
    expect(rows[1].analytic_delay).toBeNull();
    expect(rows[1].analytic_throughput).toBeNull();
  });

  it("names the missing column", () => {
    const cols = REQUIRED_COLUMNS.filter((c) => c !== "mean_delay");
    const text = `${cols.join(",")}\n0,5,proposed,10,7,0.1,0.2,0.3,0.4,,\n`;
    expect(() => parseSweepCsv(text)).toThrowError(/missing required column: mean_delay/);
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweepCsv(`${HEADER}\n`)).toThrowError(/no data rows/);
    expect(() => parseSweepCsv(HEADER)).toThrowError(/no data rows/);
  });

  it("rejects empty input", () => {
    expect(() => parseSweepCsv("")).toThrowError(CsvError);
  });

  it("reports non-numeric cells with line and column", () => {
    expect(() => parseSweepCsv(`${HEADER}\n${row({ mean_delay: "oops" })}\n`)).toThrowError(
      /line 2: column mean_delay/,
    );
  });

  it("keeps column association when the header is reordered", () => {
    const cols = [...REQUIRED_COLUMNS].reverse();
    const cells = row().split(",").reverse();
    const rows = parseSweepCsv(`${cols.join(",")}\n${cells.join(",")}\n`);
    expect(rows[0].mean_delay).toBe(2.8);
    expect(rows[0].scheme).toBe("proposed");
  });
});
