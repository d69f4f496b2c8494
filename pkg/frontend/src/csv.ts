/**
 * Parsing and validation of relay-harq sweep CSVs.
 *
 * The sweep writer emits a fixed schema; every column must be present in
 * the header, while the analytic columns may hold empty values on rows for
 * the baseline schemes.
 */

export const REQUIRED_COLUMNS = [
  "snr_db",
  "num_relays",
  "scheme",
  "trials",
  "seed",
  "mean_delay",
  "delay_stderr",
  "throughput",
  "throughput_stderr",
  "feasibility_rate",
  "analytic_delay",
  "analytic_throughput",
] as const;

export interface SweepRow {
  snr_db: number;
  num_relays: number;
  scheme: string;
  trials: number;
  seed: number;
  mean_delay: number;
  delay_stderr: number;
  throughput: number;
  throughput_stderr: number;
  feasibility_rate: number;
  analytic_delay: number | null;
  analytic_throughput: number | null;
}

export class CsvError extends Error {}

function toNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw === "" || Number.isNaN(value)) {
    throw new CsvError(`line ${line}: column ${column} is not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function toOptionalNumber(raw: string, column: string, line: number): number | null {
  return raw === "" ? null : toNumber(raw, column, line);
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line, idx) => line !== "" || idx === 0);
  if (lines.length === 0 || lines[0] === "") {
    throw new CsvError("empty input: no header row");
  }
  const header = lines[0].split(",");
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const column of REQUIRED_COLUMNS) {
    if (!index.has(column)) {
      throw new CsvError(`missing required column: ${column}`);
    }
  }
  if (lines.length < 2) {
    throw new CsvError("no data rows");
  }

  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    const lineNo = i + 2;
    const cell = (column: string) => cells[index.get(column)!] ?? "";
    return {
      snr_db: toNumber(cell("snr_db"), "snr_db", lineNo),
      num_relays: toNumber(cell("num_relays"), "num_relays", lineNo),
      scheme: cell("scheme"),
      trials: toNumber(cell("trials"), "trials", lineNo),
      seed: toNumber(cell("seed"), "seed", lineNo),
      mean_delay: toNumber(cell("mean_delay"), "mean_delay", lineNo),
      delay_stderr: toNumber(cell("delay_stderr"), "delay_stderr", lineNo),
      throughput: toNumber(cell("throughput"), "throughput", lineNo),
      throughput_stderr: toNumber(cell("throughput_stderr"), "throughput_stderr", lineNo),
      feasibility_rate: toNumber(cell("feasibility_rate"), "feasibility_rate", lineNo),
      analytic_delay: toOptionalNumber(cell("analytic_delay"), "analytic_delay", lineNo),
      analytic_throughput: toOptionalNumber(
        cell("analytic_throughput"),
        "analytic_throughput",
        lineNo,
      ),
    };
  });
}
