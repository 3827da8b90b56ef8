import { scaleLinear, type ScaleLinear } from "d3-scale";

import { el, num, px, svgDoc } from "../svg.js";

export const WIDTH = 960;
export const HEIGHT = 560;
export const MARGIN = { top: 52, right: 236, bottom: 58, left: 74 } as const;

/** Classic ten-color categorical palette, assigned by sorted series index. */
export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
] as const;

export const DASHES = ["", "7 4", "2 3", "9 4 2 4", "1 3"] as const;

/** One plotted curve plus the exact values it was built from. */
export interface Series {
  /** Display name; also the data-name attribute used for re-extraction. */
  name: string;
  /** Extra identity fields, emitted as data-<key> attributes. */
  attrs?: Record<string, string>;
  x: number[];
  y: number[];
  /** Optional lower/upper band (same length as x). */
  lo?: number[];
  hi?: number[];
  /** Optional horizontal reference level (e.g. a perfect-CSI baseline). */
  ref?: number;
}

export interface LineChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

type Lin = ScaleLinear<number, number>;

function extent(values: Iterable<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function padDegenerate([lo, hi]: [number, number]): [number, number] {
  if (lo < hi) return [lo, hi];
  const d = lo === 0 ? 1 : Math.abs(lo) * 0.1;
  return [lo - d, hi + d];
}

function xAxis(scale: Lin, y0: number, label: string): string {
  const [r0, r1] = scale.range();
  const parts: string[] = [
    el("line", { x1: px(r0), y1: px(y0), x2: px(r1), y2: px(y0), stroke: "#333" }),
  ];
  for (const t of scale.ticks(8)) {
    const x = scale(t);
    parts.push(
      el("line", { x1: px(x), y1: px(y0), x2: px(x), y2: px(y0 + 6), stroke: "#333" }),
      el(
        "text",
        { x: px(x), y: px(y0 + 20), "text-anchor": "middle", "font-size": 12 },
        num(t),
      ),
    );
  }
  parts.push(
    el(
      "text",
      {
        x: px((r0 + r1) / 2),
        y: px(y0 + 42),
        "text-anchor": "middle",
        "font-size": 13,
      },
      esc2(label),
    ),
  );
  return el("g", { class: "axis x-axis" }, parts);
}

function yAxis(scale: Lin, x0: number, plotWidth: number, label: string): string {
  const [r1, r0] = scale.range(); // range is [bottom, top]
  const parts: string[] = [
    el("line", { x1: px(x0), y1: px(r0), x2: px(x0), y2: px(r1), stroke: "#333" }),
  ];
  for (const t of scale.ticks(7)) {
    const y = scale(t);
    parts.push(
      el("line", {
        x1: px(x0),
        y1: px(y),
        x2: px(x0 + plotWidth),
        y2: px(y),
        stroke: "#e0e0e0",
      }),
      el("line", { x1: px(x0 - 6), y1: px(y), x2: px(x0), y2: px(y), stroke: "#333" }),
      el(
        "text",
        {
          x: px(x0 - 9),
          y: px(y + 4),
          "text-anchor": "end",
          "font-size": 12,
        },
        num(t),
      ),
    );
  }
  const ly = (r0 + r1) / 2;
  parts.push(
    el(
      "text",
      {
        x: px(x0 - 52),
        y: px(ly),
        "text-anchor": "middle",
        "font-size": 13,
        transform: `rotate(-90 ${px(x0 - 52)} ${px(ly)})`,
      },
      esc2(label),
    ),
  );
  return el("g", { class: "axis y-axis" }, parts);
}

// Text children bypass el()'s attribute escaping, so escape them here.
function esc2(s: string): string {
  return s.replaceAll("&", "&amp;").replaceAll("<", "&lt;").replaceAll(">", "&gt;");
}

function seriesGroup(s: Series, color: string, dash: string, xs: Lin, ys: Lin): string {
  const pts = s.x.map((v, i) => `${px(xs(v))},${px(ys(s.y[i]))}`);
  const children: string[] = [];
  if (s.lo && s.hi) {
    if (s.x.length > 1) {
      const upper = s.x.map((v, i) => `${px(xs(v))},${px(ys(s.hi![i]))}`);
      const lower = s.x
        .map((v, i) => `${px(xs(v))},${px(ys(s.lo![i]))}`)
        .reverse();
      children.push(
        el("polygon", {
          class: "band",
          points: [...upper, ...lower].join(" "),
          fill: color,
          "fill-opacity": 0.15,
          stroke: "none",
        }),
      );
    } else {
      children.push(
        el("line", {
          class: "band",
          x1: px(xs(s.x[0])),
          y1: px(ys(s.lo[0])),
          x2: px(xs(s.x[0])),
          y2: px(ys(s.hi[0])),
          stroke: color,
          "stroke-opacity": 0.4,
          "stroke-width": 4,
        }),
      );
    }
  }
  if (s.ref !== undefined) {
    const [r0, r1] = xs.range();
    children.push(
      el("line", {
        class: "ref",
        x1: px(r0),
        y1: px(ys(s.ref)),
        x2: px(r1),
        y2: px(ys(s.ref)),
        stroke: color,
        "stroke-dasharray": "4 3",
        "stroke-opacity": 0.7,
      }),
    );
  }
  if (pts.length > 1) {
    children.push(
      el("polyline", {
        points: pts.join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": 1.8,
        "stroke-dasharray": dash === "" ? undefined : dash,
      }),
    );
  }
  for (const p of pts) {
    const [cx, cy] = p.split(",");
    children.push(el("circle", { cx, cy, r: 3, fill: color }));
  }
  const dataAttrs: Record<string, string | undefined> = {};
  for (const [k, v] of Object.entries(s.attrs ?? {})) dataAttrs[`data-${k}`] = v;
  return el(
    "g",
    {
      class: "series",
      "data-name": s.name,
      ...dataAttrs,
      "data-x": s.x.map(num).join(" "),
      "data-y": s.y.map(num).join(" "),
      "data-lo": s.lo ? s.lo.map(num).join(" ") : undefined,
      "data-hi": s.hi ? s.hi.map(num).join(" ") : undefined,
      "data-ref": s.ref !== undefined ? num(s.ref) : undefined,
    },
    children,
  );
}

function legend(series: Series[]): string {
  const x0 = WIDTH - MARGIN.right + 18;
  const rows = series.map((s, i) => {
    const y = MARGIN.top + 10 + i * 20;
    const color = PALETTE[i % PALETTE.length];
    const dash = DASHES[i % DASHES.length];
    return (
      el("line", {
        x1: px(x0),
        y1: px(y),
        x2: px(x0 + 26),
        y2: px(y),
        stroke: color,
        "stroke-width": 2,
        "stroke-dasharray": dash === "" ? undefined : dash,
      }) +
      el("circle", { cx: px(x0 + 13), cy: px(y), r: 3, fill: color }) +
      el(
        "text",
        { x: px(x0 + 32), y: px(y + 4), "font-size": 12 },
        esc2(s.name),
      )
    );
  });
  return el("g", { class: "legend" }, rows);
}

/** Render a titled multi-series line chart with axes and a legend. */
export function lineChart(o: LineChartOptions): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const ordered = [...o.series].sort((a, b) => (a.name < b.name ? -1 : 1));

  const allX: number[] = [];
  const allY: number[] = [];
  for (const s of ordered) {
    allX.push(...s.x);
    allY.push(...s.y);
    if (s.lo) allY.push(...s.lo);
    if (s.hi) allY.push(...s.hi);
    if (s.ref !== undefined) allY.push(s.ref);
  }
  const xs = scaleLinear()
    .domain(padDegenerate(extent(allX)))
    .range([MARGIN.left, MARGIN.left + plotW])
    .nice();
  const ys = scaleLinear()
    .domain(padDegenerate(extent(allY)))
    .range([MARGIN.top + plotH, MARGIN.top])
    .nice();

  const body: string[] = [
    el("rect", { width: WIDTH, height: HEIGHT, fill: "#ffffff" }),
    el(
      "text",
      {
        x: px(WIDTH / 2),
        y: 26,
        "text-anchor": "middle",
        "font-size": 16,
        "font-weight": "bold",
      },
      esc2(o.title),
    ),
    yAxis(ys, MARGIN.left, plotW, o.yLabel),
    xAxis(xs, MARGIN.top + plotH, o.xLabel),
    el("rect", {
      x: px(MARGIN.left),
      y: px(MARGIN.top),
      width: px(plotW),
      height: px(plotH),
      fill: "none",
      stroke: "#888",
    }),
    ...ordered.map((s, i) =>
      seriesGroup(s, PALETTE[i % PALETTE.length], DASHES[i % DASHES.length], xs, ys),
    ),
    legend(ordered),
  ];
  return svgDoc(WIDTH, HEIGHT, body);
}
