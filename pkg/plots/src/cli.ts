#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { CsvError, PlotError, UsageError } from "./errors.js";
import { FIGURE_KINDS, INPUT_COUNTS, render, type FigureKind } from "./render.js";

const USAGE = `usage: plot --kind KIND --in CSV[,CSV] --out PATH [--title TEXT] [--no-band]

Renders one SVG figure from simulator CSV output.

kinds (and their inputs):
  se-vs-m           summary.csv             mean sum SE vs. total antennas
  snr-map           snr_map.csv,walls.csv   SNR grid over the floor plan
  fairness          summary.csv             Jain fairness index vs. total antennas
  nmse-sweep        summary.csv             mean sum SE vs. channel-error variance
  capacity-compare  capacity.csv            capacity bound vs. achieved SE

options:
  --kind KIND    figure kind (required)
  --in PATHS     comma-separated input CSV path(s) (required)
  --out PATH     output SVG path (required)
  --title TEXT   override the default figure title
  --no-band      omit the 5/95 percentile band on se-vs-m
  -h, --help     show this message`;

/** Run the CLI; returns the process exit code instead of exiting. */
export function runCli(argv: string[]): number {
  let values: {
    kind?: string;
    in?: string;
    out?: string;
    title?: string;
    "no-band"?: boolean;
    help?: boolean;
  };
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        title: { type: "string" },
        "no-band": { type: "boolean" },
        help: { type: "boolean", short: "h" },
      },
      strict: true,
      allowPositionals: false,
    }));
  } catch (err) {
    console.error(`plot: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  for (const name of ["kind", "in", "out"] as const) {
    if (values[name] === undefined || values[name] === "") {
      console.error(`plot: --${name} is required`);
      console.error(USAGE);
      return 2;
    }
  }
  if (!(FIGURE_KINDS as readonly string[]).includes(values.kind!)) {
    console.error(
      `plot: unknown figure kind "${values.kind}"; expected one of: ` +
        FIGURE_KINDS.join(", "),
    );
    return 2;
  }
  const kind = values.kind as FigureKind;
  const inputs = values.in!.split(",").filter((s) => s !== "");
  if (inputs.length !== INPUT_COUNTS[kind]) {
    console.error(
      `plot: kind ${kind} takes ${INPUT_COUNTS[kind]} input CSV(s), got ${inputs.length}`,
    );
    return 2;
  }
  try {
    render({
      kind,
      inputs,
      output: values.out!,
      title: values.title,
      band: values["no-band"] ? false : undefined,
    });
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`plot: ${err.message}`);
      return 2;
    }
    if (err instanceof CsvError || err instanceof PlotError) {
      console.error(`plot: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(values.out!);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(runCli(process.argv.slice(2)));
}
