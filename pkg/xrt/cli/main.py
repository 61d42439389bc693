"""
Command-line entry point.

Each subcommand module exposes ``register(subparsers)`` and binds a
``run(args, stdout) -> int`` callable; ``main`` wires logging and the
correlation id, dispatches, and turns any failure into an exit code.
"""
import sys
from typing import List, Optional, TextIO

import pydantic

from xrt import __version__
from xrt.cli.commands import bench, gen_rays, projection, row, selftest
from xrt.cli.common import CliArgumentParser
from xrt.core.config import get_settings
from xrt.core.error_handlers import handle_exception
from xrt.core.exceptions import EXIT_OK, EXIT_VALIDATION, from_pydantic
from xrt.core.logging import get_logger, set_run_id, setup_logging

logger = get_logger("cli")

COMMAND_MODULES = (row, projection, gen_rays, selftest, bench)


def create_parser() -> CliArgumentParser:
    """Build the top-level parser with every subcommand registered."""
    parser = CliArgumentParser(
        prog="xrt",
        description="Exact intersection lengths of parallel, fan, cone and helical rays with pixel/voxel grids.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        default=None,
        help="Override XRT_LOG_LEVEL for this run",
    )
    parser.add_argument("--json-errors", action="store_true", help="Report failures as JSON on stderr")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    as_json = "--json-errors" in (sys.argv[1:] if argv is None else argv)
    try:
        try:
            current = get_settings()
        except pydantic.ValidationError as exc:
            raise from_pydantic(exc, "settings") from exc
        setup_logging(current)
        run_id = set_run_id()

        args = create_parser().parse_args(argv)
        if args.log_level:
            setup_logging(current.model_copy(update={"LOG_LEVEL": args.log_level}))
        logger.debug("Command started", extra={"command": args.command, "run_id": run_id})
        return args.func(args, stdout)
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else (EXIT_OK if exc.code is None else EXIT_VALIDATION)
    except BaseException as exc:
        return handle_exception(exc, stream=stderr, as_json=as_json)
