import { scaleLinear } from "d3-scale";

import { sampleColor } from "../colormap.js";
import { toNumber, type Table } from "../csv.js";
import { CsvError } from "../errors.js";
import { el, esc, num, px, svgDoc } from "../svg.js";

export const MAP_POINT_COLUMNS = ["x", "y", "snr_db"] as const;
export const MAP_WALL_COLUMNS = ["x1", "y1", "x2", "y2"] as const;

const MAP_WIDTH = 960;
const MAP_HEIGHT = 420;
const MAP_MARGIN = { top: 52, right: 140, bottom: 58, left: 74 } as const;

/** Smallest positive gap between sorted unique coordinates (grid pitch). */
function gridStep(values: number[]): number {
  const uniq = [...new Set(values)].sort((a, b) => a - b);
  let step = Infinity;
  for (let i = 1; i < uniq.length; i++) {
    const d = uniq[i] - uniq[i - 1];
    if (d > 1e-9 && d < step) step = d;
  }
  return Number.isFinite(step) ? step : 1;
}

/**
 * Colored grid of per-point SNR samples over the floor plan, with the wall
 * segments drawn on top and a labelled color bar.  Cells keep the row order
 * of the points file.
 */
export function snrMap(
  points: Table,
  walls: Table,
  opts: { title?: string },
): string {
  const cx = points.rows.map((r) => toNumber(r.x, `${points.path} column x`));
  const cy = points.rows.map((r) => toNumber(r.y, `${points.path} column y`));
  const cv = points.rows.map((r) => toNumber(r.snr_db, `${points.path} column snr_db`));
  const segs = walls.rows.map((r) => ({
    x1: toNumber(r.x1, `${walls.path} column x1`),
    y1: toNumber(r.y1, `${walls.path} column y1`),
    x2: toNumber(r.x2, `${walls.path} column x2`),
    y2: toNumber(r.y2, `${walls.path} column y2`),
  }));
  for (const v of cv) {
    if (!Number.isFinite(v)) {
      throw new CsvError(`${points.path}: non-finite snr_db value`);
    }
  }

  const stepX = gridStep(cx);
  const stepY = gridStep(cy);
  const xsAll = [
    ...cx.map((v) => v - stepX / 2),
    ...cx.map((v) => v + stepX / 2),
    ...segs.flatMap((s) => [s.x1, s.x2]),
  ];
  const ysAll = [
    ...cy.map((v) => v - stepY / 2),
    ...cy.map((v) => v + stepY / 2),
    ...segs.flatMap((s) => [s.y1, s.y2]),
  ];
  const xMin = Math.min(...xsAll);
  const xMax = Math.max(...xsAll);
  const yMin = Math.min(...ysAll);
  const yMax = Math.max(...ysAll);
  const extW = Math.max(xMax - xMin, 1e-9);
  const extH = Math.max(yMax - yMin, 1e-9);

  const availW = MAP_WIDTH - MAP_MARGIN.left - MAP_MARGIN.right;
  const availH = MAP_HEIGHT - MAP_MARGIN.top - MAP_MARGIN.bottom;
  const scale = Math.min(availW / extW, availH / extH);
  const plotW = extW * scale;
  const plotH = extH * scale;
  const ox = MAP_MARGIN.left + (availW - plotW) / 2;
  const oy = MAP_MARGIN.top + (availH - plotH) / 2;

  const X = scaleLinear().domain([xMin, xMax]).range([ox, ox + plotW]);
  const Y = scaleLinear().domain([yMin, yMax]).range([oy + plotH, oy]);

  let vMin = Infinity;
  let vMax = -Infinity;
  for (const v of cv) {
    if (v < vMin) vMin = v;
    if (v > vMax) vMax = v;
  }
  const span = vMax - vMin;
  const tOf = (v: number) => (span > 0 ? (v - vMin) / span : 0.5);

  const cells = cv.map((v, i) =>
    el("rect", {
      x: px(X(cx[i] - stepX / 2)),
      y: px(Y(cy[i] + stepY / 2)),
      width: px(stepX * scale),
      height: px(stepY * scale),
      fill: sampleColor(tOf(v)),
    }),
  );
  const wallLines = segs.map((s) =>
    el("line", {
      x1: px(X(s.x1)),
      y1: px(Y(s.y1)),
      x2: px(X(s.x2)),
      y2: px(Y(s.y2)),
      stroke: "#222222",
      "stroke-width": 1.5,
    }),
  );

  // Axes in meters.
  const axisParts: string[] = [];
  for (const t of X.ticks(10)) {
    axisParts.push(
      el("line", {
        x1: px(X(t)),
        y1: px(oy + plotH),
        x2: px(X(t)),
        y2: px(oy + plotH + 6),
        stroke: "#333",
      }),
      el(
        "text",
        { x: px(X(t)), y: px(oy + plotH + 20), "text-anchor": "middle", "font-size": 12 },
        num(t),
      ),
    );
  }
  for (const t of Y.ticks(5)) {
    axisParts.push(
      el("line", {
        x1: px(ox - 6),
        y1: px(Y(t)),
        x2: px(ox),
        y2: px(Y(t)),
        stroke: "#333",
      }),
      el(
        "text",
        { x: px(ox - 9), y: px(Y(t) + 4), "text-anchor": "end", "font-size": 12 },
        num(t),
      ),
    );
  }
  axisParts.push(
    el(
      "text",
      {
        x: px(ox + plotW / 2),
        y: px(oy + plotH + 42),
        "text-anchor": "middle",
        "font-size": 13,
      },
      "x (m)",
    ),
    el(
      "text",
      {
        x: px(ox - 46),
        y: px(oy + plotH / 2),
        "text-anchor": "middle",
        "font-size": 13,
        transform: `rotate(-90 ${px(ox - 46)} ${px(oy + plotH / 2)})`,
      },
      "y (m)",
    ),
  );

  // Color bar: vMax at the top, tick labels from a linear scale.
  const barX = MAP_WIDTH - MAP_MARGIN.right + 36;
  const barW = 14;
  const nSwatch = 32;
  const swatches: string[] = [];
  for (let i = 0; i < nSwatch; i++) {
    const t = 1 - i / (nSwatch - 1);
    swatches.push(
      el("rect", {
        x: px(barX),
        y: px(oy + (i * plotH) / nSwatch),
        width: px(barW),
        height: px(plotH / nSwatch + 0.5),
        fill: sampleColor(t),
      }),
    );
  }
  const barScale = scaleLinear().domain([vMin, vMax]).range([oy + plotH, oy]);
  const barTicks =
    span > 0
      ? barScale.ticks(5).map((t) =>
          el(
            "text",
            {
              x: px(barX + barW + 6),
              y: px(barScale(t) + 4),
              "font-size": 11,
            },
            num(t),
          ),
        )
      : [
          el(
            "text",
            { x: px(barX + barW + 6), y: px(oy + plotH / 2 + 4), "font-size": 11 },
            num(vMin),
          ),
        ];
  const barLabel = el(
    "text",
    { x: px(barX + barW / 2), y: px(oy - 10), "text-anchor": "middle", "font-size": 12 },
    "SNR (dB)",
  );

  const body: string[] = [
    el("rect", { width: MAP_WIDTH, height: MAP_HEIGHT, fill: "#ffffff" }),
    el(
      "text",
      {
        x: px(MAP_WIDTH / 2),
        y: 26,
        "text-anchor": "middle",
        "font-size": 16,
        "font-weight": "bold",
      },
      esc(opts.title ?? "Served-UE SNR over the floor plan"),
    ),
    el(
      "g",
      {
        class: "cells",
        "shape-rendering": "crispEdges",
        "data-x": cx.map(num).join(" "),
        "data-y": cy.map(num).join(" "),
        "data-value": cv.map(num).join(" "),
      },
      cells,
    ),
    el("g", { class: "walls", "data-count": walls.rows.length }, wallLines),
    el("g", { class: "axis" }, axisParts),
    el("g", { class: "colorbar" }, [...swatches, ...barTicks, barLabel]),
  ];
  return svgDoc(MAP_WIDTH, MAP_HEIGHT, body);
}
