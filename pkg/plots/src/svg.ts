/** Attribute map for an SVG element; undefined values are dropped. */
export type Attrs = Record<string, string | number | undefined>;

export function esc(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function el(
  tag: string,
  attrs: Attrs = {},
  children: string | string[] = [],
): string {
  const attrText = Object.entries(attrs)
    .filter(([, v]) => v !== undefined)
    .map(([k, v]) => ` ${k}="${esc(String(v))}"`)
    .join("");
  const body = Array.isArray(children) ? children.join("") : children;
  if (body === "") return `<${tag}${attrText}/>`;
  return `<${tag}${attrText}>${body}</${tag}>`;
}

/** Pixel coordinate rounded to a fixed precision so output is stable. */
export function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Full-precision data value (shortest round-trip decimal form). */
export function num(v: number): string {
  return String(v);
}

export function svgDoc(width: number, height: number, body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">` +
    body.join("") +
    `</svg>`
  );
}
