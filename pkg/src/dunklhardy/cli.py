"""Command line entry point: ``verify``, ``describe`` and ``sharpness``."""
from __future__ import annotations

import argparse
import json
import sys

from . import inequalities as ineq
from .roots import count_chambers, make_context
from .suite import ConfigError, load_config, run, skip_row


def _parse_k(text: str):
    vals = [float(v) for v in text.split(",") if v.strip()]
    return vals[0] if len(vals) == 1 else tuple(vals)


def _context(args):
    try:
        return make_context(args.family, args.rank, _parse_k(args.k))
    except ValueError as exc:
        raise ConfigError(str(exc), None, "--k" if "multiplicit" in str(exc) else "--family/--rank") from None


def describe(ctx) -> dict:
    system = ctx.system
    orbit_sizes = [sum(1 for o in system.positive_orbit if o == i) for i in range(len(system.orbits))]
    return {
        "family": system.family,
        "N": system.dim,
        "positive_roots": [list(map(float, r)) for r in system.positive_roots],
        "group_order": ctx.group.order,
        "chambers": count_chambers(system),
        "k_per_orbit": [float(v) for v in ctx.k],
        "positive_roots_per_orbit": orbit_sizes,
        "gamma": ctx.gamma,
        "homogeneous_dim": ctx.homogeneous_dim,
        "constants": ineq.sharp_constants(ctx),
    }


def cmd_verify(args) -> int:
    config = load_config(args.config)
    result = run(config, jobs=args.jobs)
    text = result.json_lines()
    out = args.out or config.output
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(result.csv_summary())
    print(f"{len(result.rows)} rows: {len(result.rows) - len(result.failures) - len(result.skips)} passed, "
          f"{len(result.failures)} failed, {len(result.skips)} skipped", file=sys.stderr)
    return result.exit_code


def cmd_describe(args) -> int:
    ctx = _context(args)
    print(json.dumps(describe(ctx), indent=None if args.compact else 2))
    return 0


def cmd_sharpness(args) -> int:
    ctx = _context(args)
    ok = True
    try:
        if args.theorem == "hardy":
            for pt in ineq.hardy_sharpness_sequence(ctx, args.n_max):
                row = {"n": pt.n, "ratio": pt.ratio, "ratio_quadrature": pt.ratio_quadrature,
                       "closed_form_displayed": pt.closed_form_displayed,
                       "closed_form_exact": pt.closed_form_exact, "constant": ineq.hardy_constant(ctx)}
                ok &= pt.ratio >= row["constant"]
                print(json.dumps(row))
        else:
            n = 2
            while n <= args.n_max:
                pt = ineq.rellich_sharpness(ctx, n)
                row = {"n": n, "ratio": pt.ratio, "constant": ineq.rellich_constant(ctx)}
                ok &= pt.ratio >= row["constant"]
                print(json.dumps(row))
                n *= 2
    except ineq.HypothesisError as exc:
        print(json.dumps(skip_row(f"{args.theorem}_sharpness", ctx.descriptor, str(exc))))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunklhardy",
                                     description="Numerical checks of Hardy-type inequalities for Dunkl operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite from a JSON config")
    v.add_argument("--config", default="default", help="config path, or 'default' for the bundled suite")
    v.add_argument("--out", help="JSON-lines output path (default: stdout)")
    v.add_argument("--csv", help="optional CSV summary path")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    def ctx_args(p, family="Z2", rank=3, k="0"):
        p.add_argument("--family", default=family, help="A, B, D, Z2 or I2")
        p.add_argument("--rank", type=int, default=rank)
        p.add_argument("--k", default=k, help="one value, or comma-separated values per orbit")

    d = sub.add_parser("describe", help="summarise a root system and its constants")
    ctx_args(d, "A", 2, "0.5")
    d.add_argument("--compact", action="store_true")
    d.set_defaults(func=cmd_describe)

    s = sub.add_parser("sharpness", help="print a sharpness sequence")
    s.add_argument("--theorem", choices=["hardy", "rellich"], required=True)
    s.add_argument("--n-max", type=int, default=64)
    ctx_args(s)
    s.set_defaults(func=cmd_sharpness)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
