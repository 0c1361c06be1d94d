/**
 * Row schemas for the three CSV artifacts a run directory contains, with
 * strict parsers and writers that round-trip the numeric values exactly.
 *
 * Every parse failure carries the source file and 1-based line number so
 * the CLI can point at the offending row.
 */

import Papa from "papaparse";

export interface ErrorRow {
  time: number;
  estimator: string;
  normId: string;
  error: number;
}

export interface LambdaRow {
  time: number;
  // -1 marks the axis a run does not resolve: space-homogeneous runs use
  // xIndex = -1, field runs use v1Index = v2Index = -1
  xIndex: number;
  v1Index: number;
  v2Index: number;
  lambda: number;
}

export interface MomentRow {
  time: number;
  xIndex: number;
  rho: number;
  ux: number;
  uy: number;
  E: number;
  T: number;
  sigmaT: number;
}

export const ERROR_CURVE_HEADER = ["time", "estimator", "norm_id", "error"];
export const LAMBDA_FIELD_HEADER = [
  "time", "x_index", "v1_index", "v2_index", "lambda",
];
export const MOMENTS_HEADER = [
  "time", "x_index", "rho", "ux", "uy", "E", "T", "sigma_T",
];

export class CsvFormatError extends Error {
  constructor(
    public readonly file: string,
    public readonly line: number,
    detail: string,
  ) {
    super(`${file}:${line}: ${detail}`);
    this.name = "CsvFormatError";
  }
}

/** Tokenize into rows of fields, keeping 1-based line numbers. */
function tokenize(text: string, file: string): [string[], number][] {
  if (text.trim() === "") {
    throw new CsvFormatError(file, 1, "empty file");
  }
  const parsed = Papa.parse<string[]>(text, {
    delimiter: ",",
    skipEmptyLines: false,
  });
  for (const err of parsed.errors) {
    const line = (err.row ?? 0) + 1;
    throw new CsvFormatError(file, line, err.message);
  }
  const rows: [string[], number][] = [];
  parsed.data.forEach((fields, i) => {
    // a trailing newline produces one final empty record; skip blanks
    if (fields.length === 1 && fields[0] === "") return;
    rows.push([fields, i + 1]);
  });
  if (rows.length === 0) {
    throw new CsvFormatError(file, 1, "empty file");
  }
  return rows;
}

function checkHeader(
  fields: string[], line: number, header: string[], file: string,
): void {
  if (fields.length !== header.length ||
      fields.some((f, i) => f !== header[i])) {
    throw new CsvFormatError(
      file, line,
      `expected header '${header.join(",")}', got '${fields.join(",")}'`);
  }
}

function floatField(
  s: string, name: string, file: string, line: number,
): number {
  const v = Number(s);
  if (s.trim() === "" || !Number.isFinite(v)) {
    throw new CsvFormatError(
      file, line, `field '${name}' is not a finite number: '${s}'`);
  }
  return v;
}

function intField(
  s: string, name: string, file: string, line: number,
): number {
  const v = floatField(s, name, file, line);
  if (!Number.isInteger(v)) {
    throw new CsvFormatError(
      file, line, `field '${name}' is not an integer: '${s}'`);
  }
  return v;
}

function stringField(
  s: string, name: string, file: string, line: number,
): string {
  if (s === "") {
    throw new CsvFormatError(file, line, `field '${name}' is empty`);
  }
  return s;
}

function checkWidth(
  fields: string[], width: number, file: string, line: number,
): void {
  if (fields.length !== width) {
    throw new CsvFormatError(
      file, line, `expected ${width} fields, got ${fields.length}`);
  }
}

export function parseErrorCurve(text: string, file: string): ErrorRow[] {
  const rows = tokenize(text, file);
  checkHeader(rows[0][0], rows[0][1], ERROR_CURVE_HEADER, file);
  return rows.slice(1).map(([f, line]) => {
    checkWidth(f, 4, file, line);
    return {
      time: floatField(f[0], "time", file, line),
      estimator: stringField(f[1], "estimator", file, line),
      normId: stringField(f[2], "norm_id", file, line),
      error: floatField(f[3], "error", file, line),
    };
  });
}

export function parseLambdaField(text: string, file: string): LambdaRow[] {
  const rows = tokenize(text, file);
  checkHeader(rows[0][0], rows[0][1], LAMBDA_FIELD_HEADER, file);
  return rows.slice(1).map(([f, line]) => {
    checkWidth(f, 5, file, line);
    return {
      time: floatField(f[0], "time", file, line),
      xIndex: intField(f[1], "x_index", file, line),
      v1Index: intField(f[2], "v1_index", file, line),
      v2Index: intField(f[3], "v2_index", file, line),
      lambda: floatField(f[4], "lambda", file, line),
    };
  });
}

export function parseMoments(text: string, file: string): MomentRow[] {
  const rows = tokenize(text, file);
  checkHeader(rows[0][0], rows[0][1], MOMENTS_HEADER, file);
  return rows.slice(1).map(([f, line]) => {
    checkWidth(f, 8, file, line);
    return {
      time: floatField(f[0], "time", file, line),
      xIndex: intField(f[1], "x_index", file, line),
      rho: floatField(f[2], "rho", file, line),
      ux: floatField(f[3], "ux", file, line),
      uy: floatField(f[4], "uy", file, line),
      E: floatField(f[5], "E", file, line),
      T: floatField(f[6], "T", file, line),
      sigmaT: floatField(f[7], "sigma_T", file, line),
    };
  });
}

/** Shortest exact decimal form; JS number formatting round-trips. */
function num(v: number): string {
  return Object.is(v, -0) ? "-0" : String(v);
}

export function writeErrorCurve(rows: ErrorRow[]): string {
  const lines = [ERROR_CURVE_HEADER.join(",")];
  for (const r of rows) {
    lines.push([num(r.time), r.estimator, r.normId, num(r.error)].join(","));
  }
  return lines.join("\n") + "\n";
}

export function writeLambdaField(rows: LambdaRow[]): string {
  const lines = [LAMBDA_FIELD_HEADER.join(",")];
  for (const r of rows) {
    lines.push([
      num(r.time), String(r.xIndex), String(r.v1Index),
      String(r.v2Index), num(r.lambda),
    ].join(","));
  }
  return lines.join("\n") + "\n";
}

export function writeMoments(rows: MomentRow[]): string {
  const lines = [MOMENTS_HEADER.join(",")];
  for (const r of rows) {
    lines.push([
      num(r.time), String(r.xIndex), num(r.rho), num(r.ux), num(r.uy),
      num(r.E), num(r.T), num(r.sigmaT),
    ].join(","));
  }
  return lines.join("\n") + "\n";
}
