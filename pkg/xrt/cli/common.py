"""Argument helpers shared by the subcommands."""
import argparse
from typing import Tuple

from xrt.core.exceptions import ValidationError
from xrt.io.rayset import parse_rayset, read_rayset
from xrt.schemas.grid import ImageGrid
from xrt.services.projector import RaySet


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as validation failures."""

    def error(self, message: str):
        raise ValidationError(f"{self.prog}: {message}", field="arguments")


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not an integer") from None
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {number}")
    return number


def add_config_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--config", required=required, help="Ray-set configuration file")
    parser.add_argument("--degrees", action="store_true", help="Read angle parameters as degrees")


def add_threads_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=positive_int,
        default=None,
        help="Worker threads for row computation (XRT_DEFAULT_THREADS when omitted)",
    )


def load_rays(args: argparse.Namespace) -> Tuple[ImageGrid, RaySet]:
    """Grid and rays from ``--config`` or from inline ``--grid``/``--ray`` flags."""
    if getattr(args, "config", None):
        return read_rayset(args.config, degrees=args.degrees)
    grid_spec = getattr(args, "grid", None)
    ray_specs = getattr(args, "ray", None) or []
    if not grid_spec or not ray_specs:
        raise ValidationError("either --config or both --grid and --ray are required", field="config")
    text = "\n".join([f"grid {grid_spec}"] + list(ray_specs)) + "\n"
    return parse_rayset(text, degrees=args.degrees)
