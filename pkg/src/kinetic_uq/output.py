"""CSV and JSON writers for experiment results.

Numbers are written with repr-faithful 17 significant digits so a rerun
with the same configuration and seed produces byte-identical files.
Wall-clock timing goes only into meta.json, never into the CSVs.
"""

import csv
import json
from pathlib import Path


def _fmt(x):
    return format(float(x), ".17g")


def write_error_curve(path, rows):
    """rows: (time, estimator, norm_id, error)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "estimator", "norm_id", "error"])
        for t, est, nid, err in rows:
            w.writerow([_fmt(t), est, nid, _fmt(err)])


def write_lambda_field(path, rows):
    """rows: (time, x_index, v1_index, v2_index, lambda); -1 marks an
    axis the value does not depend on (homogeneous runs have no x,
    moment-based lambdas have no velocity indices)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "x_index", "v1_index", "v2_index", "lambda"])
        for t, xi, j1, j2, lam in rows:
            w.writerow([_fmt(t), int(xi), int(j1), int(j2), _fmt(lam)])


def write_moments(path, rows):
    """rows: (time, x_index, rho, ux, uy, E, T, sigma_T) of the reference."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "x_index", "rho", "ux", "uy", "E", "T", "sigma_T"])
        for t, xi, rho, ux, uy, en, temp, sig in rows:
            w.writerow([_fmt(t), int(xi), _fmt(rho), _fmt(ux), _fmt(uy),
                        _fmt(en), _fmt(temp), _fmt(sig)])


def write_meta(path, meta):
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_result(result, out_dir):
    """Write the full artifact set of one experiment into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_error_curve(out / "error_curve.csv", result.error_rows)
    write_lambda_field(out / "lambda_field.csv", result.lambda_rows)
    write_moments(out / "moments.csv", result.moment_rows)
    write_meta(out / "meta.json", result.meta)
    return out
