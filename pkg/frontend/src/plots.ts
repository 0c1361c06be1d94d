/**
 * Plot builders, one per artifact: log-scale error curves, the lambda
 * field (heatmap over velocity for homogeneous runs, profile over x for
 * field runs), and the temperature confidence band.
 *
 * Each returns a complete SVG document; unplottable inputs throw.
 */

import { scaleLinear, scaleLog } from "d3-scale";
import { area, line } from "d3-shape";

import type { ErrorRow, LambdaRow, MomentRow } from "./schema.js";
import { MARGIN, PALETTE, axisBottomSvg, axisLeftSvg, decadeTicks,
         divergingColor, expFormat, lineEl, svgDocument,
         textEl } from "./svg.js";

interface Point {
  x: number;
  y: number;
}

function padDomain(lo: number, hi: number): [number, number] {
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

export function errorCurvesSvg(rows: ErrorRow[], normId = "l1"): string {
  const byEstimator = new Map<string, Point[]>();
  for (const r of rows) {
    if (r.normId !== normId) continue;
    if (!byEstimator.has(r.estimator)) byEstimator.set(r.estimator, []);
    // zero errors (exact hits) cannot sit on a log scale; drop them
    if (r.error > 0) {
      byEstimator.get(r.estimator)!.push({ x: r.time, y: r.error });
    }
  }
  if (byEstimator.size === 0) {
    throw new Error(`no rows with norm_id '${normId}'`);
  }
  const series = [...byEstimator].filter(([, pts]) => pts.length > 0);
  if (series.length === 0) {
    throw new Error(`all errors for norm_id '${normId}' are zero; ` +
                    "nothing to draw on a log scale");
  }

  const all = series.flatMap(([, pts]) => pts);
  const x = scaleLinear()
    .domain(padDomain(Math.min(...all.map(p => p.x)),
                      Math.max(...all.map(p => p.x))))
    .range([MARGIN.left, 640 - MARGIN.right]);
  let eLo = Math.min(...all.map(p => p.y));
  let eHi = Math.max(...all.map(p => p.y));
  if (eLo === eHi) {
    eLo /= 10;
    eHi *= 10;
  }
  const y = scaleLog()
    .domain([eLo, eHi]).range([420 - MARGIN.bottom, MARGIN.top]).nice();

  let body = "";
  const yTicks = decadeTicks(y.domain()[0], y.domain()[1]);
  for (const t of yTicks) {
    body += lineEl(MARGIN.left, y(t), 640 - MARGIN.right, y(t), "#dddddd");
  }
  const path = line<Point>().x(p => x(p.x)).y(p => y(p.y));
  series.forEach(([name, pts], i) => {
    const color = PALETTE[i % PALETTE.length];
    body += `<path d="${path(pts)}" fill="none" stroke="${color}" ` +
      `stroke-width="1.5"/>\n`;
    const ly = MARGIN.top + 14 * i;
    body += lineEl(640 - MARGIN.right + 8, ly, 640 - MARGIN.right + 26, ly,
                   color, 2);
    body += textEl(640 - MARGIN.right + 30, ly + 3.5, name);
  });
  body += axisBottomSvg(x, 420 - MARGIN.bottom, "time",
                        x.ticks(6), x.tickFormat(6));
  body += axisLeftSvg(y, MARGIN.left, `error (${normId})`,
                      yTicks, expFormat);
  body += textEl(MARGIN.left, 14, `error vs time, norm ${normId}`,
                 'font-size="13"');
  return svgDocument(640, 420, body);
}

function latestTime(times: number[]): number {
  return times.reduce((a, b) => Math.max(a, b), -Infinity);
}

export function lambdaViewSvg(rows: LambdaRow[], time?: number): string {
  if (rows.length === 0) throw new Error("no data rows");
  const t = time ?? latestTime(rows.map(r => r.time));
  const sel = rows.filter(r => r.time === t);
  if (sel.length === 0) throw new Error(`no rows at time ${time}`);

  const lo = Math.min(...sel.map(r => r.lambda));
  const hi = Math.max(...sel.map(r => r.lambda));
  const homogeneous = sel.every(r => r.v1Index >= 0);
  if (homogeneous) {
    return lambdaHeatmap(sel, t, lo, hi);
  }
  return lambdaProfile(sel, t, lo, hi);
}

/** Heatmap of lambda over the velocity grid at one time. */
function lambdaHeatmap(
  sel: LambdaRow[], t: number, lo: number, hi: number,
): string {
  const n1 = Math.max(...sel.map(r => r.v1Index)) + 1;
  const n2 = Math.max(...sel.map(r => r.v2Index)) + 1;
  const side = 440;
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + 8;
  const cw = side / n1;
  const ch = side / n2;
  let body = "";
  for (const r of sel) {
    const color = divergingColor(r.lambda, lo, hi, 1.0);
    // v2 increases upward
    body += `<rect x="${(x0 + r.v1Index * cw).toFixed(2)}" ` +
      `y="${(y0 + (n2 - 1 - r.v2Index) * ch).toFixed(2)}" ` +
      `width="${(cw + 0.05).toFixed(2)}" height="${(ch + 0.05).toFixed(2)}" ` +
      `fill="${color}"/>\n`;
  }
  body += `<rect x="${x0}" y="${y0}" width="${side}" height="${side}" ` +
    `fill="none" stroke="black"/>\n`;
  body += textEl(x0 + side / 2, y0 + side + 18, "v1 index",
                 'text-anchor="middle" font-size="12"');
  body += `<text x="${x0 - 14}" y="${y0 + side / 2}" text-anchor="middle" ` +
    `font-size="12" transform="rotate(-90 ${x0 - 14} ${y0 + side / 2})">` +
    `v2 index</text>\n`;
  body += textEl(x0, 14,
                 `lambda at t=${t}: ${lo.toPrecision(3)} to ` +
                 `${hi.toPrecision(3)} (white = 1)`, 'font-size="13"');
  return svgDocument(x0 + side + MARGIN.right, y0 + side + 40, body);
}

/** lambda against cell index for field runs, with the lambda = 1 line. */
function lambdaProfile(
  sel: LambdaRow[], t: number, lo: number, hi: number,
): string {
  const pts = sel
    .slice()
    .sort((a, b) => a.xIndex - b.xIndex)
    .map(r => ({ x: r.xIndex, y: r.lambda }));
  const x = scaleLinear()
    .domain(padDomain(pts[0].x, pts[pts.length - 1].x))
    .range([MARGIN.left, 640 - MARGIN.right]);
  const y = scaleLinear()
    .domain(padDomain(Math.min(lo, 1.0), Math.max(hi, 1.0)))
    .range([420 - MARGIN.bottom, MARGIN.top]);
  const path = line<Point>().x(p => x(p.x)).y(p => y(p.y));
  let body = lineEl(MARGIN.left, y(1.0), 640 - MARGIN.right, y(1.0),
                    "#888888");
  body += `<path d="${path(pts)}" fill="none" stroke="${PALETTE[0]}" ` +
    `stroke-width="1.8"/>\n`;
  body += textEl(640 - MARGIN.right + 6, y(1.0) + 3.5, "lambda = 1");
  body += axisBottomSvg(x, 420 - MARGIN.bottom, "x index",
                        x.ticks(6), x.tickFormat(6));
  body += axisLeftSvg(y, MARGIN.left, "lambda",
                      y.ticks(6), y.tickFormat(6));
  body += textEl(MARGIN.left, 14, `lambda profile at t=${t}`,
                 'font-size="13"');
  return svgDocument(640, 420, body);
}

interface BandPoint {
  x: number;
  mean: number;
  sd: number;
}

export function confidenceBandSvg(rows: MomentRow[]): string {
  if (rows.length === 0) throw new Error("no data rows");
  const tEnd = latestTime(rows.map(r => r.time));
  const atEnd = rows.filter(r => r.time === tEnd);
  const xValues = new Set(atEnd.map(r => r.xIndex));

  let pts: BandPoint[];
  let xLabel: string;
  let title: string;
  if (xValues.size > 1) {
    pts = atEnd
      .slice()
      .sort((a, b) => a.xIndex - b.xIndex)
      .map(r => ({ x: r.xIndex, mean: r.T, sd: r.sigmaT }));
    xLabel = "x index";
    title = `temperature at t=${tEnd}, mean and one-sigma band`;
  } else {
    pts = rows
      .slice()
      .sort((a, b) => a.time - b.time)
      .map(r => ({ x: r.time, mean: r.T, sd: r.sigmaT }));
    xLabel = "time";
    title = "temperature history, mean and one-sigma band";
  }

  const x = scaleLinear()
    .domain(padDomain(pts[0].x, pts[pts.length - 1].x))
    .range([MARGIN.left, 640 - MARGIN.right]);
  const y = scaleLinear()
    .domain(padDomain(Math.min(...pts.map(p => p.mean - p.sd)),
                      Math.max(...pts.map(p => p.mean + p.sd))))
    .range([420 - MARGIN.bottom, MARGIN.top]);

  const band = area<BandPoint>()
    .x(p => x(p.x)).y0(p => y(p.mean - p.sd)).y1(p => y(p.mean + p.sd));
  const mean = line<BandPoint>().x(p => x(p.x)).y(p => y(p.mean));
  let body = `<path d="${band(pts)}" fill="#9ecae1" fill-opacity="0.6"/>\n`;
  body += `<path d="${mean(pts)}" fill="none" stroke="${PALETTE[0]}" ` +
    `stroke-width="1.8"/>\n`;
  const lx = 640 - MARGIN.right + 8;
  body += lineEl(lx, MARGIN.top, lx + 18, MARGIN.top, PALETTE[0], 2);
  body += textEl(lx + 22, MARGIN.top + 3.5, "mean T");
  body += `<rect x="${lx}" y="${MARGIN.top + 10}" width="18" height="8" ` +
    `fill="#9ecae1" fill-opacity="0.6"/>\n`;
  body += textEl(lx + 22, MARGIN.top + 17.5, "one sigma");
  body += axisBottomSvg(x, 420 - MARGIN.bottom, xLabel,
                        x.ticks(6), x.tickFormat(6));
  body += axisLeftSvg(y, MARGIN.left, "temperature",
                      y.ticks(6), y.tickFormat(6));
  body += textEl(MARGIN.left, 14, title, 'font-size="13"');
  return svgDocument(640, 420, body);
}

export function availableNorms(rows: ErrorRow[]): string[] {
  return [...new Set(rows.map(r => r.normId))];
}
