/** Small SVG string builder — enough for static vector figures. */

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs, children?: string): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return children === undefined
    ? `<${tag}${a}/>`
    : `<${tag}${a}>${children}</${tag}>`;
}

export function text(x: number, y: number, s: string, attrs: Attrs = {}): string {
  return el(
    "text",
    { x: fix(x), y: fix(y), "font-family": "sans-serif", ...attrs },
    escapeXml(s),
  );
}

export function svgDoc(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

/** Linear map [d0, d1] -> [r0, r1]. */
export function linscale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (x: number) => number {
  const k = (r1 - r0) / (d1 - d0);
  return (x) => r0 + (x - d0) * k;
}

export function polyline(
  pts: Array<[number, number]>,
  attrs: Attrs,
): string {
  const d = pts
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fix(x)} ${fix(y)}`)
    .join(" ");
  return el("path", { d, fill: "none", ...attrs });
}

export function fix(x: number): string {
  return x.toFixed(2);
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/**
 * Label a phase that sits on a multiple of pi/2; undefined otherwise.
 * fmtHalfPi(3*pi/2) -> "3π/2", fmtHalfPi(-pi) -> "−π".
 */
export function fmtHalfPi(phi: number): string | undefined {
  const k = Math.round(phi / (Math.PI / 2));
  if (Math.abs(phi - (k * Math.PI) / 2) > 1e-9) return undefined;
  if (k === 0) return "0";
  const sign = k < 0 ? "−" : "";
  const n = Math.abs(k);
  if (n % 2 === 0) {
    const m = n / 2;
    return `${sign}${m === 1 ? "" : m}π`;
  }
  return `${sign}${n === 1 ? "" : n}π/2`;
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];
