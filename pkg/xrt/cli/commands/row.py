"""``row``: print the intersection row of a single ray."""
import argparse
from typing import TextIO

from xrt.cli.common import add_config_arguments, load_rays
from xrt.core.exceptions import EXIT_OK, ValidationError
from xrt.core.logging import get_logger
from xrt.schemas.grid import UnitIndex3D
from xrt.schemas.rows import SparseRow
from xrt.services.grid import unflat_index
from xrt.services.projector import compute_row

logger = get_logger("cli.row")


def format_row(row: SparseRow, grid, index_form: str = "flat", full_precision: bool = False) -> str:
    """Two columns: index and length (six significant digits unless full precision)."""
    lines = []
    for record in row:
        if index_form == "nd":
            idx = unflat_index(record.flat_index, grid)
            index = f"({idx.k},{idx.j},{idx.i})" if isinstance(idx, UnitIndex3D) else f"({idx.j},{idx.i})"
        else:
            index = str(record.flat_index)
        length = repr(record.length) if full_precision else f"{record.length:.6g}"
        lines.append(f"{index} {length}")
    return "\n".join(lines)


def run(args: argparse.Namespace, stdout: TextIO) -> int:
    grid, rays = load_rays(args)
    if len(rays) != 1:
        raise ValidationError(f"row expects exactly one ray, got {len(rays)}", field="config")
    row = compute_row(rays.beams[0], grid)
    logger.info("Row computed", extra={"geometry": rays.beams[0].geometry, "nnz": len(row)})
    text = format_row(row, grid, args.index_form, args.full_precision)
    if text:
        print(text, file=stdout)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "row",
        help="Intersection lengths of one ray",
        description="Print 'index length' for every unit the ray crosses, sorted by flat index.",
    )
    add_config_arguments(parser, required=False)
    parser.add_argument("--grid", help='Inline grid parameters, e.g. "nx=3 ny=3 scale=1"')
    parser.add_argument("--ray", action="append", help='Inline ray, e.g. "parallel2d s=1 phi=0.785398"')
    parser.add_argument("--index-form", choices=("flat", "nd"), default="flat", help="Flat or (k,)j,i indices")
    parser.add_argument("--full-precision", action="store_true", help="Print lengths with full double precision")
    parser.set_defaults(func=run)
