"""Command line interface.

Subcommands:

  run       solve one benchmark and write CSV/JSON artifacts
  allocate  print the ensemble sizes affordable for a sample budget
  validate  quick self-checks of the numerical building blocks

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import ast
import sys

import numpy as np

from .errors import ConfigError, KineticUQError, NumericalError, PairingError, ParameterError
from .experiments import build_test, run_experiment
from .output import write_result
from .uq_core import CostModel, allocate_samples


def _parse_value(text):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _load_config_file(path):
    overrides = {}
    try:
        with open(path) as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{line_no}: expected KEY=VALUE, got {line!r}")
                key, _, value = line.partition("=")
                overrides[key.strip()] = _parse_value(value.strip())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return overrides


def _cmd_run(args):
    overrides = {}
    if args.config:
        overrides.update(_load_config_file(args.config))
    for flag in ("eps", "samples", "ensemble", "seed"):
        value = getattr(args, flag)
        if value is not None:
            key = {"samples": "m", "ensemble": "m_e"}.get(flag, flag)
            overrides[key] = value
    if args.cv or args.lam:
        if not (args.cv and args.lam):
            raise ConfigError("--cv and --lambda must be given together")
        overrides["estimators"] = ((args.cv, args.lam),)
    file_test = overrides.pop("test", None)
    file_scale = overrides.pop("scale", None)
    test = args.test if args.test is not None else file_test
    if test is None:
        raise ConfigError("no test selected: pass --test or set test= in the config file")
    scale = args.scale or file_scale or "desk"
    config = build_test(test, scale=scale, **overrides)
    print(f"running test {config.test} ({config.scale}, model={config.model}, "
          f"m={config.m}, seed={config.seed})")
    result = run_experiment(config)
    for t in result.times:
        print(f"  recorded t = {t:g}")
    out = write_result(result, args.out)
    print(f"wrote error_curve.csv, lambda_field.csv, moments.csv, meta.json to {out}")
    return 0


def _cmd_allocate(args):
    cost = CostModel(n_v=args.n_v, n_angles=args.n_angles,
                     ratio_bgk=args.ratio_bgk, ratio_euler=args.ratio_euler)
    m_e_bgk, m_e_euler = allocate_samples(cost, args.samples)
    print(f"kinetic samples      M    = {args.samples}")
    print(f"bgk ensemble size    M_E1 = {m_e_bgk}")
    print(f"euler ensemble size  M_E2 = {m_e_euler}")
    return 0


def _cmd_validate(_args):
    from .validate import run_validation
    failures = run_validation()
    if failures:
        raise NumericalError(f"{failures} validation check(s) failed")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kinetic-uq",
        description="Multi-scale control variate Monte Carlo for kinetic equations")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one benchmark")
    run_p.add_argument("--test", type=int, help="benchmark id (1-5)")
    run_p.add_argument("--scale", choices=["desk", "paper"], help="resolution preset")
    run_p.add_argument("--eps", type=float, help="Knudsen number (field tests)")
    run_p.add_argument("--samples", type=int, help="kinetic sample count M")
    run_p.add_argument("--ensemble", type=int, help="control variate ensemble size M_E")
    run_p.add_argument("--seed", type=int, help="random seed")
    run_p.add_argument("--cv", choices=["equilibrium", "bgk", "euler"],
                       help="control variate kind (replaces the default roster)")
    run_p.add_argument("--lambda", dest="lam",
                       choices=["zero", "one", "optimal", "cost-corrected", "optimal-moment"],
                       help="lambda mode for --cv")
    run_p.add_argument("--config", help="KEY=VALUE override file")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.set_defaults(func=_cmd_run)

    alloc_p = sub.add_parser("allocate", help="ensemble sizes for a budget")
    alloc_p.add_argument("--samples", type=int, default=10, help="kinetic sample count M")
    alloc_p.add_argument("--n-v", type=int, default=32, help="velocity points per dimension")
    alloc_p.add_argument("--n-angles", type=int, default=8, help="angular quadrature size")
    alloc_p.add_argument("--ratio-bgk", type=float, default=1.25,
                         help="kinetic/bgk per-mode cost ratio C/C1")
    alloc_p.add_argument("--ratio-euler", type=float, default=1.0,
                         help="kinetic/euler per-cell cost ratio C/C2")
    alloc_p.set_defaults(func=_cmd_allocate)

    val_p = sub.add_parser("validate", help="quick numerical self-checks")
    val_p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, PairingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except KineticUQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
