"""``bench``: per-row timing and candidate counts over growing grids."""
import argparse
from typing import TextIO

from xrt.cli.common import positive_int
from xrt.core.exceptions import EXIT_OK
from xrt.services.perfbench import bench_row, format_report


def _int_list(value: str):
    try:
        numbers = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not a comma-separated list of integers") from None
    if not numbers or any(number < 1 for number in numbers):
        raise argparse.ArgumentTypeError("every entry must be at least 1")
    return numbers


def run(args: argparse.Namespace, stdout: TextIO) -> int:
    reports = [
        bench_row(
            args.dim,
            n,
            args.rays,
            seed=args.seed,
            include_oracle=args.oracle,
            workers=args.workers or (),
        )
        for n in args.sizes
    ]
    print(format_report(reports), file=stdout)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="Time rows and count examined units")
    parser.add_argument("--dim", type=int, choices=(2, 3), default=2)
    parser.add_argument("--sizes", type=_int_list, default=[16, 32, 64, 128], help="Grid sizes N, e.g. 16,32,64")
    parser.add_argument("--rays", type=positive_int, default=200, help="Random rays per grid")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--oracle", action="store_true", help="Also time the brute-force reference")
    parser.add_argument("--workers", type=_int_list, default=None, help="Thread counts for rows/sec, e.g. 1,2,4")
    parser.set_defaults(func=run)
