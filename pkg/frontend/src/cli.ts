#!/usr/bin/env node
/**
 * Usage:
 *   harq-sweep-plots render --input sweep.csv --out figs/
 *       [--format png|svg] [--metric delay|throughput] [--dump-points points.json]
 */

import { parseArgs } from "node:util";

import { render, ImageFormat } from "./render.js";
import { Metric } from "./series.js";

const USAGE =
  "usage: harq-sweep-plots render --input sweep.csv --out figs/ " +
  "[--format png|svg] [--metric delay|throughput] [--dump-points points.json]";

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error(USAGE);
    return 2;
  }
  let values;
  try {
    ({ values } = parseArgs({
      args: rest,
      options: {
        input: { type: "string" },
        out: { type: "string" },
        format: { type: "string", default: "svg" },
        metric: { type: "string" },
        "dump-points": { type: "string" },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  if (!values.input || !values.out) {
    console.error(`error: --input and --out are required\n${USAGE}`);
    return 2;
  }
  if (values.format !== "png" && values.format !== "svg") {
    console.error(`error: --format must be png or svg, got ${values.format}`);
    return 2;
  }
  if (values.metric !== undefined && values.metric !== "delay" && values.metric !== "throughput") {
    console.error(`error: --metric must be delay or throughput, got ${values.metric}`);
    return 2;
  }

  try {
    const written = await render({
      inputCsv: values.input,
      outputDir: values.out,
      format: values.format as ImageFormat,
      metric: values.metric as Metric | undefined,
      dumpPointsPath: values["dump-points"],
    });
    for (const file of written) {
      console.log(file);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
