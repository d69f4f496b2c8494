/**
 * Groups sweep rows into one plottable series per (scheme, relay count),
 * in first-appearance order, with values passed through untransformed.
 */

import { SweepRow } from "./csv.js";

export type Metric = "delay" | "throughput";

export const METRICS: Metric[] = ["delay", "throughput"];

export interface Point {
  snr_db: number;
  value: number;
  stderr: number;
}

export interface AnalyticPoint {
  snr_db: number;
  value: number;
}

export interface Series {
  scheme: string;
  num_relays: number;
  label: string;
  points: Point[];
  analytic: AnalyticPoint[];
}

const FIELDS: Record<Metric, { value: keyof SweepRow; stderr: keyof SweepRow; analytic: keyof SweepRow }> = {
  delay: { value: "mean_delay", stderr: "delay_stderr", analytic: "analytic_delay" },
  throughput: { value: "throughput", stderr: "throughput_stderr", analytic: "analytic_throughput" },
};

export function buildSeries(rows: SweepRow[], metric: Metric): Series[] {
  const fields = FIELDS[metric];
  const byKey = new Map<string, Series>();
  for (const row of rows) {
    const key = `${row.scheme}|${row.num_relays}`;
    let series = byKey.get(key);
    if (!series) {
      series = {
        scheme: row.scheme,
        num_relays: row.num_relays,
        label: `${row.scheme} N=${row.num_relays}`,
        points: [],
        analytic: [],
      };
      byKey.set(key, series);
    }
    series.points.push({
      snr_db: row.snr_db,
      value: row[fields.value] as number,
      stderr: row[fields.stderr] as number,
    });
    const analytic = row[fields.analytic] as number | null;
    if (analytic !== null) {
      series.analytic.push({ snr_db: row.snr_db, value: analytic });
    }
  }
  return [...byKey.values()];
}

export function dumpPoints(rows: SweepRow[], metrics: Metric[]): string {
  const payload: Record<string, Series[]> = {};
  for (const metric of metrics) {
    payload[metric] = buildSeries(rows, metric);
  }
  return JSON.stringify(payload, null, 2) + "\n";
}
