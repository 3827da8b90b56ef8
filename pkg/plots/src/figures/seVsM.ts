import { toNumber, type Table } from "../csv.js";
import { CsvError } from "../errors.js";
import { lineChart, type Series } from "./common.js";

export const SE_VS_M_COLUMNS = [
  "deployment",
  "scheme",
  "M",
  "sigmaE2_db",
  "sum_se_mean",
  "sum_se_p5",
  "sum_se_p95",
] as const;

/**
 * Mean sum spectral efficiency versus total antenna count, one curve per
 * (deployment, scheme), drawn from the perfect-CSI rows of summary.csv.
 * Each curve optionally carries its 5th-95th percentile band.
 */
export function seVsM(summary: Table, opts: { title?: string; band?: boolean }): string {
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
        y: toNumber(r.sum_se_mean, `${summary.path} column sum_se_mean`),
        lo: toNumber(r.sum_se_p5, `${summary.path} column sum_se_p5`),
        hi: toNumber(r.sum_se_p95, `${summary.path} column sum_se_p95`),
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
      lo: opts.band === false ? undefined : pts.map((p) => p.lo),
      hi: opts.band === false ? undefined : pts.map((p) => p.hi),
    };
  });
  return lineChart({
    title: opts.title ?? "Mean sum spectral efficiency vs. total antennas",
    xLabel: "total transmit antennas M",
    yLabel: "mean sum spectral efficiency (bit/s/Hz)",
    series,
  });
}
