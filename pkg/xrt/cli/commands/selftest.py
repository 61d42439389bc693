"""``selftest``: golden tables plus a reduced oracle sweep."""
import argparse
from typing import TextIO

from xrt.cli.common import positive_int
from xrt.core.exceptions import EXIT_OK
from xrt.services.selftest import run_selftest


def run(args: argparse.Namespace, stdout: TextIO) -> int:
    report = run_selftest(oracle_rays=args.oracle_rays, seed=args.seed)
    print(f"selftest passed: {report.summary}", file=stdout)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "selftest",
        help="Run the built-in acceptance checks",
        description="Exit 0 when every golden table and the oracle sweep pass, 3 otherwise.",
    )
    parser.add_argument(
        "--oracle-rays",
        type=positive_int,
        default=None,
        help="Random rays per dimension for the oracle sweep (XRT_SELFTEST_ORACLE_RAYS when omitted)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Sampling seed (XRT_SELFTEST_SEED when omitted)")
    parser.set_defaults(func=run)
