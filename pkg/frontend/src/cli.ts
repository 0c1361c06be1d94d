/**
 * Command line entry point: render one SVG from one run artifact.
 *
 *   plots error-curves    <error_curve.csv>  --out plot.svg [--norm l1]
 *   plots lambda-view     <lambda_field.csv> --out plot.svg [--time T]
 *   plots confidence-band <moments.csv>      --out plot.svg
 *
 * Exit codes: 0 success, 1 bad input data, 2 usage error.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { availableNorms, confidenceBandSvg, errorCurvesSvg,
         lambdaViewSvg } from "./plots.js";
import { parseErrorCurve, parseLambdaField, parseMoments } from "./schema.js";

const USAGE = `usage: plots <command> <input.csv> --out <file.svg>
commands:
  error-curves     error_curve.csv   [--norm ID]   log-scale error vs time
  lambda-view      lambda_field.csv  [--time T]    lambda heatmap or profile
  confidence-band  moments.csv                     temperature band`;

function usageError(message: string): number {
  process.stderr.write(`${message}\n${USAGE}\n`);
  return 2;
}

export function runCli(argv: string[]): number {
  let values: { out?: string; norm?: string; time?: string };
  let positionals: string[];
  try {
    ({ values, positionals } = parseArgs({
      args: argv,
      options: {
        out: { type: "string" },
        norm: { type: "string" },
        time: { type: "string" },
      },
      allowPositionals: true,
    }));
  } catch (err) {
    return usageError((err as Error).message);
  }
  if (positionals.length !== 2) {
    return usageError("expected a command and one input file");
  }
  if (!values.out) {
    return usageError("--out is required");
  }
  const [command, input] = positionals;
  if (!["error-curves", "lambda-view", "confidence-band"].includes(command)) {
    return usageError(`unknown command '${command}'`);
  }

  try {
    const text = readFileSync(input, "utf8");
    let svg: string;
    switch (command) {
      case "error-curves": {
        const rows = parseErrorCurve(text, input);
        const norm = values.norm ?? "l1";
        if (values.norm !== undefined &&
            !availableNorms(rows).includes(norm)) {
          throw new Error(`norm '${norm}' not in file; available: ` +
                          availableNorms(rows).join(", "));
        }
        svg = errorCurvesSvg(rows, norm);
        break;
      }
      case "lambda-view": {
        const rows = parseLambdaField(text, input);
        let t: number | undefined;
        if (values.time !== undefined) {
          t = Number(values.time);
          if (!Number.isFinite(t)) {
            return usageError(`--time must be a number, got '${values.time}'`);
          }
        }
        svg = lambdaViewSvg(rows, t);
        break;
      }
      case "confidence-band": {
        svg = confidenceBandSvg(parseMoments(text, input));
        break;
      }
      default:
        return usageError(`unknown command '${command}'`);
    }
    writeFileSync(values.out, svg);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const isMain = process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  process.exit(runCli(process.argv.slice(2)));
}
