"""Command line: ``ustatci ci``, ``ustatci curves``, ``ustatci coverage``.

Exit codes: 0 ok, 2 parse error, 3 precondition failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import coverage as cov
from . import curves
from .errors import PreconditionError
from .intervals import METHODS
from .kernels import KernelRangeError, identity_kernel, variance_kernel
from .methods import family, interval_for_sample

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_IO = 0, 2, 3, 4

KERNELS = {"mean": identity_kernel, "variance": variance_kernel}


class ParseError(Exception):
    pass


def read_values(path) -> list[float]:
    """One number per line; a non-numeric first line is taken as a header."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    values = []
    for i, line in enumerate(lines):
        text = line.strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            if i == 0:
                continue
            raise ParseError(f"{path}:{i + 1}: not a number: {text!r}") from None
    return values


def _csv_list(conv):
    def parse(text):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return parse


def _render_ci(ci) -> str:
    rows = [
        ("method", ci.method), ("side", ci.side), ("level", repr(ci.level)),
        ("target", ci.target), ("n", ci.n), ("m", ci.m),
        ("center", repr(ci.center)), ("lower", repr(ci.lower)), ("upper", repr(ci.upper)),
        ("half_width", repr(ci.half_width)),
    ]
    rows += [(f"term.{k}", repr(v)) for k, v in ci.terms.items()]
    rows.append(("floor_free", ci.floor_free))
    return "\n".join(f"{k}: {v}" for k, v in rows)


def cmd_ci(args) -> int:
    values = read_values(args.input)
    if not values:
        raise PreconditionError(f"{args.input}: no data")
    ci = interval_for_sample(values, args.method, args.delta, KERNELS[args.kernel](),
                             args.side, args.floor_free, args.as_printed)
    if args.json:
        print(json.dumps(ci.to_dict(), indent=2))
    else:
        print(_render_ci(ci))
    return EXIT_OK


def _write(path, writer):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer(fh)


def cmd_curves(args) -> int:
    n_range = tuple(range(args.n_min, args.n_max + 1, args.n_step))
    if not n_range:
        raise PreconditionError("empty n range")
    opts = dict(floor_free=args.floor_free, as_printed=args.as_printed, m=args.m)
    if args.s2 is not None or args.delta is not None:
        s2 = args.s2 if args.s2 is not None else 0.05
        delta = args.delta if args.delta is not None else 0.1
        panels = [curves.CurveSpec(methods=tuple(args.methods), n_range=n_range, s2=s2,
                                   delta=delta, scale=args.scale,
                                   title=f"S_n^2 = {s2:g}, delta = {delta:g}", **opts)]
    else:
        panels = curves.figure_panels(n_range, args.methods, args.scale, **opts)
    out = Path(args.out)
    svg = Path(args.svg) if args.svg else out.with_suffix(".svg")
    _write(out, lambda fh: curves.write_csv(panels, fh))
    svg_text = curves.render_svg(panels)
    _write(svg, lambda fh: fh.write(svg_text))
    print(f"wrote {out} and {svg}")
    return EXIT_OK


def cmd_coverage(args) -> int:
    if args.replicates < cov.MIN_REPLICATES:
        raise PreconditionError(f"--replicates must be >= {cov.MIN_REPLICATES}")
    dgps = [cov.DgpSpec.parse(d) for d in (args.dgp or cov.DEFAULT_DGPS)]
    if args.methods:
        specs = [cov.MethodSpec(m, args.side, k) for m in args.methods
                 for k in (args.m if family(m) == "ustat" else [1])]
    else:
        specs = cov.default_specs()
    reports = []
    for dgp in dgps:
        for n in args.n:
            usable = [s for s in specs if n >= 2 * s.m]
            if not usable:
                continue
            reports += cov.run_coverage_grid(dgp, usable, n, args.delta, args.replicates,
                                             args.seed, jobs=args.jobs,
                                             floor_free=args.floor_free)
    if args.out:
        _write(args.out, lambda fh: cov.write_reports(reports, fh))
    else:
        cov.write_reports(reports, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ustatci", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    ci = sub.add_parser("ci", help="confidence interval from a data file")
    ci.add_argument("input", help="CSV with one value in [0, 1] per line")
    ci.add_argument("--kernel", choices=sorted(KERNELS), default="mean")
    ci.add_argument("--method", choices=METHODS, required=True)
    ci.add_argument("--delta", type=float, default=0.05)
    ci.add_argument("--side", choices=("upper", "lower", "two"))
    ci.add_argument("--floor-free", action="store_true")
    ci.add_argument("--as-printed", action="store_true")
    ci.add_argument("--json", action="store_true")
    ci.set_defaults(func=cmd_ci)

    cu = sub.add_parser("curves", help="half-width comparison curves (CSV + SVG)")
    cu.add_argument("--out", required=True, help="CSV output path")
    cu.add_argument("--svg", help="SVG output path (default: --out with .svg suffix)")
    cu.add_argument("--methods", type=_csv_list(str), default=list(curves.FIGURE_METHODS))
    cu.add_argument("--s2", type=float, help="single panel at this S_n^2")
    cu.add_argument("--delta", type=float, help="single panel at this delta")
    cu.add_argument("--m", type=int, default=1, help="kernel order for U-statistic methods")
    cu.add_argument("--n-min", type=int, default=4)
    cu.add_argument("--n-max", type=int, default=1000)
    cu.add_argument("--n-step", type=int, default=2)
    cu.add_argument("--scale", choices=("log", "linear"), default="log")
    cu.add_argument("--floor-free", action="store_true")
    cu.add_argument("--as-printed", action="store_true")
    cu.set_defaults(func=cmd_curves)

    co = sub.add_parser("coverage", help="Monte Carlo coverage table (CSV)")
    co.add_argument("--dgp", action="append",
                    help="bernoulli(p), uniform01, beta(a,b) or discrete(x:p;...); repeatable")
    co.add_argument("--n", type=_csv_list(int), default=list(cov.DEFAULT_N))
    co.add_argument("--delta", type=_csv_list(float), default=list(cov.DEFAULT_DELTAS))
    co.add_argument("--methods", type=_csv_list(str))
    co.add_argument("--side", choices=("upper", "lower", "two"))
    co.add_argument("--m", type=_csv_list(int), default=[1],
                    help="kernel orders for U-statistic methods (1: mean, 2: variance)")
    co.add_argument("--replicates", type=int, default=cov.DEFAULT_REPLICATES)
    co.add_argument("--seed", type=int, default=20190210)
    co.add_argument("--jobs", type=int, default=1)
    co.add_argument("--floor-free", action="store_true")
    co.add_argument("--out", help="CSV output path (default: stdout)")
    co.set_defaults(func=cmd_coverage)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, KernelRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
