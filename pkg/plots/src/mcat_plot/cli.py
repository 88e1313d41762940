"""`mcat-plot`: render convergence figures from benchmark CSV traces.

Exit codes: 0 success, 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys

from .render import render_traces
from .traces import TraceFormatError, read_trace


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcat-plot", description=__doc__)
    parser.add_argument("traces", nargs="+", metavar="TRACE", help="benchmark CSV trace files")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--log", action="store_true", help="log-scale y axes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        traces = [read_trace(p) for p in args.traces]
    except (TraceFormatError, OSError) as exc:
        print(f"mcat-plot: {exc}", file=sys.stderr)
        return 2
    summary = render_traces(traces, args.out, log_scale=args.log)
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
