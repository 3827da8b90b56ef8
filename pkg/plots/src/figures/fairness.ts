import { toNumber, type Table } from "../csv.js";
import { CsvError } from "../errors.js";
import { lineChart, type Series } from "./common.js";

export const FAIRNESS_COLUMNS = [
  "deployment",
  "scheme",
  "M",
  "sigmaE2_db",
  "jain_mean",
] as const;

/**
 * Mean Jain fairness index versus total antenna count, one curve per
 * (deployment, scheme), from the perfect-CSI rows of summary.csv.
 */
export function fairness(summary: Table, opts: { title?: string }): string {
  const rows = summary.rows.filter(
    (r) => toNumber(r.sigmaE2_db, `${summary.path} column sigmaE2_db`) === -Infinity,
  );
  if (rows.length === 0) {
    throw new CsvError(
      `${summary.path}: no perfect-CSI rows (sigmaE2_db = -inf) to plot`,
    );
  }
  const groups = new Map<string, typeof rows>();
  for (const r of rows) {
    const key = `${r.deployment}/${r.scheme}`;
    const bucket = groups.get(key);
    if (bucket) bucket.push(r);
    else groups.set(key, [r]);
  }
  const series: Series[] = [...groups.keys()].sort().map((name) => {
    const bucket = groups.get(name)!;
    const pts = bucket
      .map((r) => ({
        m: toNumber(r.M, `${summary.path} column M`),
        y: toNumber(r.jain_mean, `${summary.path} column jain_mean`),
      }))
      .sort((a, b) => a.m - b.m);
    for (let i = 1; i < pts.length; i++) {
      if (pts[i].m === pts[i - 1].m) {
        throw new CsvError(
          `${summary.path}: duplicate rows for ${name} at M=${pts[i].m}`,
        );
      }
    }
    const [deployment, scheme] = name.split("/");
    return {
      name,
      attrs: { deployment, scheme },
      x: pts.map((p) => p.m),
      y: pts.map((p) => p.y),
    };
  });
  return lineChart({
    title: opts.title ?? "Jain fairness index vs. total antennas",
    xLabel: "total transmit antennas M",
    yLabel: "mean Jain fairness index",
    series,
  });
}
