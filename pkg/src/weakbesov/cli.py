"""Command-line front end.

Subcommands: gen, eval, norm, classify, verify.  Exit status is 0 on
success or a passing scenario, 1 on a failing scenario or a numerical
error, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .blaschke import (
    BlaschkeProduct,
    gen_exponential,
    gen_growing_density,
    gen_stacked_carleson,
    load_zeros,
)
from .errors import WeakBesovError
from .experiments import SCENARIOS, ExperimentConfig, atomic_write, run, write_curves, write_report
from .measure import PolarGrid
from .norms import LambdaGrid, tilde_L1w_norm, weak_quasinorm_mu_p
from .zeros import classify


class UsageError(Exception):
    pass


def _emit(text, path):
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    if args.kind == "exponential":
        seq = gen_exponential(args.m, args.depth, args.placement, args.seed)
    elif args.kind == "growing":
        seq = gen_growing_density(args.s, args.depth)
    else:
        seq = gen_stacked_carleson(args.k, args.depth)
    _emit(json.dumps(seq.to_json(), indent=1, sort_keys=True) + "\n", args.out)
    return 0


def _product(path):
    seq = load_zeros(path)
    return seq, BlaschkeProduct(seq.finite_part() if not seq.is_finite else seq)


def cmd_eval(args):
    _, B = _product(args.zeros)
    r = 1.0 - np.logspace(0, -args.depth, args.nr)
    r = r[r >= 0]
    theta = np.arange(args.nt) * (2 * np.pi / args.nt)
    z = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    val = B(z)
    der = B.prime(z)
    rows = ["re,im,B_re,B_im,dB_re,dB_im"]
    for zi, v, d in zip(z, val, der):
        rows.append(",".join(repr(float(x)) for x in (zi.real, zi.imag, v.real, v.imag, d.real, d.imag)))
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_norm(args):
    _, B = _product(args.zeros)
    lam = LambdaGrid(args.lam_min, args.lam_max)
    grid = PolarGrid(depth=args.grid_depth)
    if args.kind == "weak":
        est = weak_quasinorm_mu_p(B.prime, args.p, lam_grid=lam, grid=grid, max_steps=args.steps)
    else:
        est = tilde_L1w_norm(B.prime, lam_grid=lam, grid=grid, max_steps=args.steps)
    _emit(json.dumps(est.to_json(), indent=1, sort_keys=True) + "\n", args.out)
    return 0


def cmd_classify(args):
    seq = load_zeros(args.zeros)
    _emit(json.dumps(classify(seq, args.depth).to_json(), indent=1, sort_keys=True) + "\n", args.out)
    return 0


def cmd_verify(args):
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
    doc["scenario"] = args.scenario
    if args.p is not None:
        doc["p"] = args.p
    if args.seed is not None:
        doc["seed"] = args.seed
    try:
        config = ExperimentConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    report = run(config)
    out = args.out or f"report_{config.scenario}.json"
    write_report(report, out, timing=args.timing)
    if args.curves:
        write_curves(report, args.curves)
    print(f"{config.scenario}: {'pass' if report.passed else 'fail'} -> {out}", file=sys.stderr)
    return 0 if report.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="weakbesov", description="Blaschke products and weak-space diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a zero-sequence JSON")
    g.add_argument("--kind", choices=("exponential", "growing", "stacked"), required=True)
    g.add_argument("--m", type=int, default=1, help="zeros per annulus (exponential)")
    g.add_argument("--s", type=float, default=1.0, help="growth exponent (growing)")
    g.add_argument("--k", type=int, default=100, help="zeros in the box (stacked)")
    g.add_argument("--depth", type=int, required=True, help="annuli J, or box level j for stacked")
    g.add_argument("--placement", choices=("radial", "jittered"), default="radial")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eval", help="tabulate B and B' on a polar grid")
    e.add_argument("--zeros", required=True)
    e.add_argument("--nr", type=int, default=32)
    e.add_argument("--nt", type=int, default=64)
    e.add_argument("--depth", type=int, default=10, help="innermost ring at 1-|z| = 10^-depth")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    n = sub.add_parser("norm", help="weak-space norm of B' as JSON")
    n.add_argument("--zeros", required=True)
    n.add_argument("--kind", choices=("weak", "tilde"), default="weak")
    n.add_argument("--p", type=float, default=2.0)
    n.add_argument("--lam-min", type=float, default=0.1)
    n.add_argument("--lam-max", type=float, default=1e6)
    n.add_argument("--grid-depth", type=int, default=8)
    n.add_argument("--steps", type=int, default=8)
    n.add_argument("--out")
    n.set_defaults(func=cmd_norm)

    c = sub.add_parser("classify", help="classify a zero sequence")
    c.add_argument("--zeros", required=True)
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="run a verification scenario")
    v.add_argument("--scenario", choices=SCENARIOS, required=True)
    v.add_argument("--p", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--config")
    v.add_argument("--out")
    v.add_argument("--curves", help="directory for lambda,value CSV profiles")
    v.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (WeakBesovError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
