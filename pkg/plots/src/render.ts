import { writeFileSync } from "node:fs";

import { readTable } from "./csv.js";
import { UsageError } from "./errors.js";
import { capacityCompare, CAPACITY_COLUMNS } from "./figures/capacityCompare.js";
import { fairness, FAIRNESS_COLUMNS } from "./figures/fairness.js";
import { nmseSweep, NMSE_SWEEP_COLUMNS } from "./figures/nmseSweep.js";
import { seVsM, SE_VS_M_COLUMNS } from "./figures/seVsM.js";
import { snrMap, MAP_POINT_COLUMNS, MAP_WALL_COLUMNS } from "./figures/snrMap.js";

export const FIGURE_KINDS = [
  "se-vs-m",
  "snr-map",
  "fairness",
  "nmse-sweep",
  "capacity-compare",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

/** How many input CSVs each kind consumes, in order. */
export const INPUT_COUNTS: Record<FigureKind, number> = {
  "se-vs-m": 1,
  "snr-map": 2,
  fairness: 1,
  "nmse-sweep": 1,
  "capacity-compare": 1,
};

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSV paths; snr-map takes [points, walls], the rest one file. */
  inputs: string[];
  /** Output SVG path (used by render(); renderToString() ignores it). */
  output: string;
  title?: string;
  /** Draw the 5/95 percentile band on se-vs-m curves (default true). */
  band?: boolean;
}

/** Render the figure to an SVG string without touching the filesystem output. */
export function renderToString(spec: Omit<FigureSpec, "output">): string {
  if (!(FIGURE_KINDS as readonly string[]).includes(spec.kind)) {
    throw new UsageError(
      `unknown figure kind "${spec.kind}"; expected one of: ${FIGURE_KINDS.join(", ")}`,
    );
  }
  const expected = INPUT_COUNTS[spec.kind];
  if (spec.inputs.length !== expected) {
    throw new UsageError(
      `kind ${spec.kind} takes ${expected} input CSV(s), got ${spec.inputs.length}` +
        (spec.kind === "snr-map" ? " (expected: points CSV, walls CSV)" : ""),
    );
  }
  switch (spec.kind) {
    case "se-vs-m":
      return seVsM(readTable(spec.inputs[0], SE_VS_M_COLUMNS), {
        title: spec.title,
        band: spec.band,
      });
    case "snr-map":
      return snrMap(
        readTable(spec.inputs[0], MAP_POINT_COLUMNS),
        readTable(spec.inputs[1], MAP_WALL_COLUMNS),
        { title: spec.title },
      );
    case "fairness":
      return fairness(readTable(spec.inputs[0], FAIRNESS_COLUMNS), {
        title: spec.title,
      });
    case "nmse-sweep":
      return nmseSweep(readTable(spec.inputs[0], NMSE_SWEEP_COLUMNS), {
        title: spec.title,
      });
    case "capacity-compare":
      return capacityCompare(readTable(spec.inputs[0], CAPACITY_COLUMNS), {
        title: spec.title,
      });
  }
}

/**
 * Render the figure and write it to spec.output.  The file is written only
 * after the whole figure has been built, so a failed render leaves nothing
 * behind.
 */
export function render(spec: FigureSpec): void {
  const svg = renderToString(spec);
  writeFileSync(spec.output, svg, "utf8");
}
