/**
 * Re-extraction of the exact data series embedded in rendered figures.
 *
 * Every series group carries its plotted values in data-* attributes with
 * full-precision decimal text, so a figure can be checked against the CSV
 * it came from without any pixel inspection.
 */

export interface ExtractedSeries {
  name: string;
  /** Identity attributes (deployment, scheme, metric, m, ...). */
  attrs: Record<string, string>;
  x: number[];
  y: number[];
  lo?: number[];
  hi?: number[];
  ref?: number;
}

function unescape(s: string): string {
  return s
    .replaceAll("&quot;", '"')
    .replaceAll("&lt;", "<")
    .replaceAll("&gt;", ">")
    .replaceAll("&amp;", "&");
}

function attrsOf(tag: string): Record<string, string> {
  const out: Record<string, string> = {};
  const re = /([a-zA-Z_][-a-zA-Z0-9_:.]*)="([^"]*)"/g;
  for (const m of tag.matchAll(re)) out[m[1]] = unescape(m[2]);
  return out;
}

function groupTags(svg: string, className: string): Record<string, string>[] {
  const out: Record<string, string>[] = [];
  for (const m of svg.matchAll(/<g\b[^>]*>/g)) {
    const attrs = attrsOf(m[0]);
    if (attrs.class === className) out.push(attrs);
  }
  return out;
}

function numberList(s: string): number[] {
  return s === "" ? [] : s.split(" ").map(Number);
}

/** Pull every line-chart series (values, band, reference) out of an SVG. */
export function extractSeries(svg: string): ExtractedSeries[] {
  return groupTags(svg, "series").map((attrs) => {
    const extra: Record<string, string> = {};
    for (const [k, v] of Object.entries(attrs)) {
      if (!k.startsWith("data-")) continue;
      const name = k.slice(5);
      if (!["name", "x", "y", "lo", "hi", "ref"].includes(name)) extra[name] = v;
    }
    return {
      name: attrs["data-name"],
      attrs: extra,
      x: numberList(attrs["data-x"]),
      y: numberList(attrs["data-y"]),
      lo: attrs["data-lo"] === undefined ? undefined : numberList(attrs["data-lo"]),
      hi: attrs["data-hi"] === undefined ? undefined : numberList(attrs["data-hi"]),
      ref: attrs["data-ref"] === undefined ? undefined : Number(attrs["data-ref"]),
    };
  });
}

/** Pull the coverage-map cell centers and values out of an SVG. */
export function extractCells(svg: string): { x: number[]; y: number[]; value: number[] } {
  const groups = groupTags(svg, "cells");
  if (groups.length !== 1) {
    throw new Error(`expected exactly one cells group, found ${groups.length}`);
  }
  return {
    x: numberList(groups[0]["data-x"]),
    y: numberList(groups[0]["data-y"]),
    value: numberList(groups[0]["data-value"]),
  };
}

/** Number of wall segments drawn on a coverage map. */
export function extractWallCount(svg: string): number {
  const groups = groupTags(svg, "walls");
  if (groups.length !== 1) {
    throw new Error(`expected exactly one walls group, found ${groups.length}`);
  }
  return Number(groups[0]["data-count"]);
}
