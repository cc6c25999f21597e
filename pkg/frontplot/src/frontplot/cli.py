"""frontplot: render figures from frontlab output files.

    frontplot render --kind exponent --in ens.csv --out fig.png
    frontplot render --kind cdf-overlay --in ens.csv lim.csv \
        --horizon 100000 --out fig.png

Inputs are consumed strictly as files; nothing links back to the
simulation package.  Exit codes: 0 rendered, 1 usage error, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, render
from .io import SchemaError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="frontplot")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--in", dest="inputs", nargs="+", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--kappa", type=float, default=None)
    r.add_argument("--horizon", type=float, default=None)
    r.add_argument("--max-events", type=int, default=None)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    options = {}
    if args.kappa is not None:
        options["kappa"] = args.kappa
    if args.horizon is not None:
        options["horizon"] = args.horizon
    if args.max_events is not None:
        options["max_events"] = args.max_events
    try:
        render(args.kind, args.inputs, args.out, options)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"frontplot: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
