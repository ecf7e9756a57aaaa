/**
 * Minimal SVG assembly: linear and symmetric-log scales, axes, and
 * polyline series.  No DOM; everything is string concatenation so the
 * renderer runs in plain Node.
 */

export type YScale = "linear" | "symlog";

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[]): Extent {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

/** sign-preserving log mapping, linear below the threshold */
export function symlog(v: number, threshold: number): number {
  return Math.sign(v) * Math.log10(1 + Math.abs(v) / threshold);
}

export class Scale {
  constructor(
    readonly domain: Extent,
    readonly range: Extent,
    readonly kind: YScale = "linear",
    readonly threshold = 1e-12,
  ) {}

  private forward(v: number): number {
    return this.kind === "symlog" ? symlog(v, this.threshold) : v;
  }

  apply(v: number): number {
    const d0 = this.forward(this.domain.min);
    const d1 = this.forward(this.domain.max);
    const f = d1 === d0 ? 0.5 : (this.forward(v) - d0) / (d1 - d0);
    return this.range.min + f * (this.range.max - this.range.min);
  }

  ticks(n = 5): number[] {
    const out: number[] = [];
    for (let i = 0; i <= n; i++) {
      out.push(this.domain.min + ((this.domain.max - this.domain.min) * i) / n);
    }
    return out;
  }
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return v.toPrecision(3).replace(/\.?0+$/, "");
  return v.toExponential(1);
}

export function polyline(
  xs: number[],
  ys: number[],
  x: Scale,
  y: Scale,
  stroke: string,
): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    pts.push(`${x.apply(xs[i]).toFixed(2)},${y.apply(ys[i]).toFixed(2)}`);
  }
  if (pts.length === 0) return "";
  return `<polyline fill="none" stroke="${stroke}" stroke-width="1.2" points="${pts.join(" ")}"/>`;
}

export function axes(
  x: Scale,
  y: Scale,
  opts: { xLabel?: string; yLabel?: string; side?: "left" | "right" } = {},
): string {
  const side = opts.side ?? "left";
  const parts: string[] = [];
  const x0 = x.range.min;
  const x1 = x.range.max;
  const yPix = side === "left" ? x0 : x1;
  const y0 = y.range.min;
  const y1 = y.range.max;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#444" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${yPix}" y1="${y0}" x2="${yPix}" y2="${y1}" stroke="#444" stroke-width="1"/>`,
  );
  for (const t of x.ticks()) {
    const px = x.apply(t);
    parts.push(
      `<text x="${px.toFixed(1)}" y="${y0 + 14}" font-size="8" text-anchor="middle" fill="#333">${esc(fmt(t))}</text>`,
    );
  }
  const anchor = side === "left" ? "end" : "start";
  const off = side === "left" ? -4 : 4;
  for (const t of y.ticks(4)) {
    const py = y.apply(t);
    parts.push(
      `<text x="${yPix + off}" y="${(py + 3).toFixed(1)}" font-size="8" text-anchor="${anchor}" fill="#333">${esc(fmt(t))}</text>`,
    );
  }
  if (opts.xLabel) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="${y0 + 26}" font-size="9" text-anchor="middle" fill="#111">${esc(opts.xLabel)}</text>`,
    );
  }
  if (opts.yLabel) {
    const lx = side === "left" ? x0 - 44 : x1 + 44;
    parts.push(
      `<text x="${lx}" y="${(y0 + y1) / 2}" font-size="9" text-anchor="middle" fill="#111" transform="rotate(-90 ${lx} ${(y0 + y1) / 2})">${esc(opts.yLabel)}</text>`,
    );
  }
  return parts.join("\n");
}

export function svgDocument(
  width: number,
  height: number,
  body: string,
): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
