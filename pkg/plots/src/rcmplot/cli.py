"""Command line front end: result files in, a PNG figure out.

Exit codes follow the harness convention: 0 on success, 2 for usage
or input-validation problems (the message names the flag or the
offending field), 1 for runtime failures such as an unwritable
output file.
"""

import argparse
import os
import sys

from .io import SchemaError
from .render import KINDS, PlotSpec, render

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcm-plot",
        description="Render persisted simulation results into PNG figures.",
    )
    parser.add_argument("--summary", required=True,
                        help="summary JSON file written by a run or sweep")
    parser.add_argument("--raw",
                        help="raw CSV samples (required for histogram and threshold_sweep)")
    parser.add_argument("--kind", choices=KINDS, default="convergence",
                        help="figure kind (default: convergence)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--log-x", action="store_true",
                        help="logarithmic intensity axis")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.kind in ("histogram", "threshold_sweep") and args.raw is None:
        print(f"error: --raw: figure kind {args.kind!r} needs the raw samples file",
              file=sys.stderr)
        return 2
    out_dir = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(out_dir) or not os.access(out_dir, os.W_OK):
        print(f"error: --out: directory {out_dir!r} is not writable", file=sys.stderr)
        return 2

    spec = PlotSpec(summary=args.summary, raw=args.raw, kind=args.kind,
                    out=args.out, log_x=args.log_x)
    try:
        render(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
