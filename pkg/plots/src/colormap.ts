/**
 * Anchor-based color ramp for the coverage map: dark blue through cyan and
 * green to yellow and red, sampled by linear interpolation in RGB.
 */
const ANCHORS: ReadonlyArray<readonly [number, string]> = [
  [0.0, "#1a2a6c"],
  [0.25, "#00b4d8"],
  [0.5, "#2dc653"],
  [0.75, "#ffd93d"],
  [1.0, "#e63946"],
];

function channels(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function toHex(rgb: [number, number, number]): string {
  return "#" + rgb.map((c) => c.toString(16).padStart(2, "0")).join("");
}

/** Sample the ramp at t in [0, 1]; out-of-range values are clamped. */
export function sampleColor(t: number): string {
  const u = Math.min(1, Math.max(0, t));
  for (let i = 0; i < ANCHORS.length - 1; i++) {
    const [posA, hexA] = ANCHORS[i];
    const [posB, hexB] = ANCHORS[i + 1];
    if (u <= posB) {
      const w = (u - posA) / (posB - posA);
      const a = channels(hexA);
      const b = channels(hexB);
      return toHex([
        Math.round(a[0] + (b[0] - a[0]) * w),
        Math.round(a[1] + (b[1] - a[1]) * w),
        Math.round(a[2] + (b[2] - a[2]) * w),
      ]);
    }
  }
  return ANCHORS[ANCHORS.length - 1][1];
}
