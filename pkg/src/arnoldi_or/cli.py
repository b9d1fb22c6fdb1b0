"""Command-line driver: ``arnoldi-or {solve,region,bounds,construct,bench}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .construction import PrescribedProblem, assemble, validate_curve
from .errors import ArnoldiORError, ConfigError
from .experiment import ExperimentConfig, bench, default_bench_problem, run_experiment
from .mmio import write_matrix_market
from .ratfun import Polynomial

CONSTRUCT_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser():
    parser = _Parser(prog="arnoldi-or",
                     description="Rational Krylov approximation experiments.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, config_required=True):
        p.add_argument("--config", type=Path, required=config_required,
                       help="experiment configuration (JSON)")
        p.add_argument("--out", type=Path, help="output directory (overrides the config)")
        p.add_argument("--seed", type=_u64, help="base seed for derived random streams")

    common(sub.add_parser("solve", help="run the approximation methods and write curves.csv"))
    common(sub.add_parser("region", help="numerical range, removed disks and spectrum"))
    common(sub.add_parser("bounds", help="error bound curves"))

    p = sub.add_parser("construct",
                       help="build (A, b) with prescribed eigenvalues and residual curve")
    common(p, config_required=False)
    p.add_argument("--phi", help="JSON list of residual norms phi(0..n-J)")
    p.add_argument("--eigenvalues", help="JSON list of numbers or [re, im] pairs")
    p.add_argument("--den", default="[0, 1]",
                   help="JSON list of ascending coefficients of D (default: D(z) = z)")

    p = sub.add_parser("bench", help="per-step timing of basic vs incremental Arnoldi-OR")
    common(p, config_required=False)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--kmax", type=int, default=60)
    p.add_argument("--degD", type=int, default=3)
    p.add_argument("--repeats", type=int, default=5)
    return parser


def _complex_list(text, what):
    try:
        vals = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{what}: invalid JSON ({exc.msg})") from None
    if not isinstance(vals, list) or not vals:
        raise UsageError(f"--{what} must be a non-empty JSON list")
    out = []
    for v in vals:
        if isinstance(v, list) and len(v) == 2:
            out.append(complex(v[0], v[1]))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise UsageError(f"--{what}: entries must be numbers or [re, im] pairs")
    return out


def _load_config(args):
    if not args.config.is_file():
        raise UsageError(f"config file not found: {args.config}")
    return ExperimentConfig.from_file(args.config, seed=args.seed)


def _experiment(args, parts):
    cfg = _load_config(args)
    out = args.out if args.out is not None else cfg.base_dir / cfg.output_dir
    rec = run_experiment(cfg, out, parts)
    for m, msg in rec.diagnostics.get("method_errors", {}).items():
        print(f"warning: {m} failed: {msg}", file=sys.stderr)
    print(f"wrote results to {out}")
    return 0


def _construct(args):
    phi, lam, den = args.phi, args.eigenvalues, args.den
    if args.config is not None:
        if not args.config.is_file():
            raise UsageError(f"config file not found: {args.config}")
        try:
            obj = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, exc.lineno) from None
        phi = phi or obj.get("phi")
        lam = lam or obj.get("eigenvalues")
        den = obj.get("den", den)
    if phi is None or lam is None:
        raise UsageError("construct needs --phi and --eigenvalues (or a config holding them)")
    phi = [z.real for z in _complex_list(phi, "phi")]
    lam = _complex_list(lam, "eigenvalues")
    D = Polynomial(_complex_list(den, "den"))
    prescribed = PrescribedProblem(np.array(lam), D, np.array(phi))
    result = assemble(prescribed, seed=args.seed)
    val = validate_curve(result, prescribed)
    out = args.out or Path("construct_out")
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_market(out / "A.mtx", result.A)
    write_matrix_market(out / "b.mtx", result.b.reshape(-1, 1))
    val.to_csv(out / "validation.csv")
    print(f"max relative deviation {val.max_deviation:.3e}; wrote {out}")
    if val.max_deviation > CONSTRUCT_TOL:
        print(f"error: residual curve deviates by {val.max_deviation:.3e} > {CONSTRUCT_TOL:g}",
              file=sys.stderr)
        return 1
    return 0


def _bench(args):
    seed = args.seed or 0
    if args.config is not None:
        cfg = _load_config(args)
        prob, kmax = cfg.build(), cfg.kmax
    else:
        if args.kmax + args.degD > args.n:
            raise UsageError("kmax + degD must not exceed n")
        prob = default_bench_problem(args.n, args.degD, seed)
        kmax = args.kmax
    res = bench(prob, kmax, repeats=args.repeats)
    out = args.out or Path("bench_out")
    out.mkdir(parents=True, exist_ok=True)
    res.to_csv(out / "bench.csv")
    summary = {"basic_exponent": res.basic_exponent,
               "incremental_exponent": res.incremental_exponent,
               "n": prob.n, "kmax": kmax}
    with open(out / "bench.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"fit exponents: basic {res.basic_exponent:.2f}, "
          f"incremental {res.incremental_exponent:.2f}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 2
        if args.command == "solve":
            return _experiment(args, ("curves", "region", "bounds"))
        if args.command == "region":
            return _experiment(args, ("region",))
        if args.command == "bounds":
            return _experiment(args, ("region", "bounds"))
        if args.command == "construct":
            return _construct(args)
        return _bench(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ArnoldiORError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
