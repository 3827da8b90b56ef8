import { toNumber, type Table } from "../csv.js";
import { CsvError } from "../errors.js";
import { lineChart, type Series } from "./common.js";

export const NMSE_SWEEP_COLUMNS = [
  "deployment",
  "scheme",
  "M",
  "sigmaE2_db",
  "sum_se_mean",
] as const;

interface Point {
  sigma: number;
  y: number;
}

/**
 * Mean sum spectral efficiency versus channel-error variance, one curve per
 * (deployment, scheme, M) over the finite sigmaE2_db levels.  When the file
 * also carries perfect-CSI rows (sigmaE2_db = -inf), each curve gets a
 * dashed horizontal reference line at its perfect-CSI value.
 */
export function nmseSweep(summary: Table, opts: { title?: string }): string {
  const finite = new Map<string, Point[]>();
  const refs = new Map<string, number>();
  const labels = new Map<string, { deployment: string; scheme: string; m: number }>();
  const perPair = new Map<string, Set<number>>();

  for (const r of summary.rows) {
    const sigma = toNumber(r.sigmaE2_db, `${summary.path} column sigmaE2_db`);
    const m = toNumber(r.M, `${summary.path} column M`);
    const y = toNumber(r.sum_se_mean, `${summary.path} column sum_se_mean`);
    const key = `${r.deployment}/${r.scheme}/${m}`;
    labels.set(key, { deployment: r.deployment, scheme: r.scheme, m });
    const pair = `${r.deployment}/${r.scheme}`;
    const ms = perPair.get(pair) ?? new Set<number>();
    ms.add(m);
    perPair.set(pair, ms);
    if (sigma === -Infinity) {
      if (refs.has(key)) {
        throw new CsvError(`${summary.path}: duplicate perfect-CSI row for ${key}`);
      }
      refs.set(key, y);
    } else {
      const bucket = finite.get(key);
      if (bucket) bucket.push({ sigma, y });
      else finite.set(key, [{ sigma, y }]);
    }
  }
  if (finite.size === 0) {
    throw new CsvError(
      `${summary.path}: no finite sigmaE2_db rows to plot against`,
    );
  }
  const series: Series[] = [...finite.keys()].sort().map((key) => {
    const pts = finite.get(key)!.sort((a, b) => a.sigma - b.sigma);
    for (let i = 1; i < pts.length; i++) {
      if (pts[i].sigma === pts[i - 1].sigma) {
        throw new CsvError(
          `${summary.path}: duplicate rows for ${key} at sigmaE2_db=${pts[i].sigma}`,
        );
      }
    }
    const { deployment, scheme, m } = labels.get(key)!;
    const multiM = (perPair.get(`${deployment}/${scheme}`)?.size ?? 1) > 1;
    return {
      name: multiM ? `${deployment}/${scheme} (M=${m})` : `${deployment}/${scheme}`,
      attrs: { deployment, scheme, m: String(m) },
      x: pts.map((p) => p.sigma),
      y: pts.map((p) => p.y),
      ref: refs.get(key),
    };
  });
  return lineChart({
    title: opts.title ?? "Mean sum spectral efficiency vs. channel-error variance",
    xLabel: "channel-error variance (dB)",
    yLabel: "mean sum spectral efficiency (bit/s/Hz)",
    series,
  });
}
