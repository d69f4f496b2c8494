/**
 * End-to-end figure generation: sweep CSV in, one image per metric out,
 * optionally dumping the exact plotted series as JSON.
 */

import { mkdir, readFile, writeFile } from "node:fs/promises";
import path from "node:path";

import { parseSweepCsv } from "./csv.js";
import { buildSeries, dumpPoints, Metric, METRICS } from "./series.js";
import { renderFigure } from "./svg.js";

export type ImageFormat = "png" | "svg";

export interface RenderSpec {
  inputCsv: string;
  outputDir: string;
  format?: ImageFormat;
  metric?: Metric; // default: both figures
  dumpPointsPath?: string;
}

const FIGURES: Record<Metric, { title: string; yLabel: string }> = {
  delay: { title: "Average delay vs SNR", yLabel: "average delay (transmission slots)" },
  throughput: { title: "Throughput vs SNR", yLabel: "throughput (bits/symbol)" },
};

async function toPng(svg: string): Promise<Buffer> {
  const { Resvg } = await import("@resvg/resvg-js");
  return new Resvg(svg).render().asPng();
}

export async function render(spec: RenderSpec): Promise<string[]> {
  const format = spec.format ?? "svg";
  const metrics = spec.metric ? [spec.metric] : METRICS;
  const rows = parseSweepCsv(await readFile(spec.inputCsv, "utf-8"));

  await mkdir(spec.outputDir, { recursive: true });
  const written: string[] = [];
  for (const metric of metrics) {
    const svg = renderFigure(buildSeries(rows, metric), {
      title: FIGURES[metric].title,
      xLabel: "SNR (dB)",
      yLabel: FIGURES[metric].yLabel,
    });
    const file = path.join(spec.outputDir, `${metric}.${format}`);
    if (format === "png") {
      await writeFile(file, await toPng(svg));
    } else {
      await writeFile(file, svg, "utf-8");
    }
    written.push(file);
  }

  if (spec.dumpPointsPath) {
    await writeFile(spec.dumpPointsPath, dumpPoints(rows, metrics), "utf-8");
    written.push(spec.dumpPointsPath);
  }
  return written;
}
