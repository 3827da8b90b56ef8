import { toNumber, type Table } from "../csv.js";
import { CsvError } from "../errors.js";
import { lineChart, type Series } from "./common.js";

export const CAPACITY_COLUMNS = [
  "deployment",
  "M",
  "drop",
  "realization",
  "capacity_bound",
  "se_total_power",
  "se_per_bs",
] as const;

const METRICS: ReadonlyArray<readonly [string, string]> = [
  ["capacity_bound", "capacity bound"],
  ["se_total_power", "joint ZF, total-power rescale"],
  ["se_per_bs", "joint ZF, per-BS rescale"],
];

/**
 * Sum-capacity upper bound versus the spectral efficiency the joint
 * zero-forcing scheme achieves, averaged over (drop, realization) rows per
 * antenna count.  Means are taken in file row order.
 */
export function capacityCompare(table: Table, opts: { title?: string }): string {
  const byDeployment = new Map<string, Record<string, string>[]>();
  for (const r of table.rows) {
    const bucket = byDeployment.get(r.deployment);
    if (bucket) bucket.push(r);
    else byDeployment.set(r.deployment, [r]);
  }
  const multiDep = byDeployment.size > 1;
  const series: Series[] = [];
  for (const dep of [...byDeployment.keys()].sort()) {
    const rows = byDeployment.get(dep)!;
    const ms = [
      ...new Set(rows.map((r) => toNumber(r.M, `${table.path} column M`))),
    ].sort((a, b) => a - b);
    for (const [column, label] of METRICS) {
      const y = ms.map((m) => {
        const vals = rows
          .filter((r) => toNumber(r.M, `${table.path} column M`) === m)
          .map((r) => toNumber(r[column], `${table.path} column ${column}`));
        let total = 0;
        for (const v of vals) total += v;
        return total / vals.length;
      });
      series.push({
        name: multiDep ? `${dep}: ${label}` : label,
        attrs: { deployment: dep, metric: column },
        x: ms,
        y,
      });
    }
  }
  if (series.length === 0) {
    throw new CsvError(`${table.path}: no rows to plot`);
  }
  return lineChart({
    title: opts.title ?? "Sum-capacity bound vs. achieved spectral efficiency",
    xLabel: "total transmit antennas M",
    yLabel: "spectral efficiency (bit/s/Hz)",
    series,
  });
}
