/**
 * Minimal SVG assembly helpers: the plots are static documents, so the
 * scene is just strings built around d3 scales (which are DOM-free).
 */

import type { ScaleContinuousNumeric } from "d3-scale";

export type Scale = ScaleContinuousNumeric<number, number>;

export const MARGIN = { top: 24, right: 150, bottom: 46, left: 68 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function svgDocument(
  width: number, height: number, body: string,
): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="sans-serif" font-size="11">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body + `</svg>\n`;
}

export function textEl(
  x: number, y: number, s: string, attrs = "",
): string {
  return `<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" ${attrs}>` +
    `${esc(s)}</text>\n`;
}

export function lineEl(
  x1: number, y1: number, x2: number, y2: number,
  stroke: string, width = 1,
): string {
  return `<line x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" ` +
    `x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}" stroke="${stroke}" ` +
    `stroke-width="${width}"/>\n`;
}

/** Horizontal axis drawn at pixel row y, with ticks below it. */
export function axisBottomSvg(
  scale: Scale, y: number, label: string,
  ticks: number[], fmt: (v: number) => string,
): string {
  const [r0, r1] = scale.range();
  let out = lineEl(r0, y, r1, y, "black");
  for (const t of ticks) {
    const px = scale(t);
    out += lineEl(px, y, px, y + 5, "black");
    out += textEl(px, y + 17, fmt(t), 'text-anchor="middle"');
  }
  out += textEl((r0 + r1) / 2, y + 34, label,
    'text-anchor="middle" font-size="12"');
  return out;
}

/** Vertical axis drawn at pixel column x, with ticks to its left. */
export function axisLeftSvg(
  scale: Scale, x: number, label: string,
  ticks: number[], fmt: (v: number) => string,
): string {
  const [r0, r1] = scale.range();
  let out = lineEl(x, r0, x, r1, "black");
  for (const t of ticks) {
    const py = scale(t);
    out += lineEl(x - 5, py, x, py, "black");
    out += textEl(x - 8, py + 3.5, fmt(t), 'text-anchor="end"');
  }
  const cy = (r0 + r1) / 2;
  out += `<text x="${(x - 48).toFixed(1)}" y="${cy.toFixed(1)}" ` +
    `text-anchor="middle" font-size="12" ` +
    `transform="rotate(-90 ${(x - 48).toFixed(1)} ${cy.toFixed(1)})">` +
    `${esc(label)}</text>\n`;
  return out;
}

/** Decade tick positions for a log axis, thinned to at most ~8 labels. */
export function decadeTicks(lo: number, hi: number): number[] {
  const e0 = Math.ceil(Math.log10(lo) - 1e-9);
  const e1 = Math.floor(Math.log10(hi) + 1e-9);
  const step = Math.max(1, Math.ceil((e1 - e0) / 8));
  const out: number[] = [];
  for (let e = e0; e <= e1; e += step) out.push(10 ** e);
  return out.length > 0 ? out : [lo];
}

export function expFormat(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

/** Blue below, white at the center value, red above. */
export function divergingColor(
  v: number, lo: number, hi: number, center: number,
): string {
  const f = (c: number) => Math.max(0, Math.min(255, Math.round(c)));
  if (v >= center) {
    const span = Math.max(hi - center, 1e-300);
    const t = Math.min(1, (v - center) / span);
    return `rgb(${f(255)},${f(255 - 190 * t)},${f(255 - 215 * t)})`;
  }
  const span = Math.max(center - lo, 1e-300);
  const t = Math.min(1, (center - v) / span);
  return `rgb(${f(255 - 200 * t)},${f(255 - 135 * t)},${f(255 - 35 * t)})`;
}
