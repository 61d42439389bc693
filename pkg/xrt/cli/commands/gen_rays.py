"""
``gen-rays``: standard acquisitions as ray-set configuration files.

Sampling conventions:

- view angles are half-open: parallel2d uses phi_v = pi*v/V, every other
  geometry turns through 2*pi*v/V;
- detector parameters are uniformly spaced with inclusive endpoints
  (a single detector sits at 0);
- helical sources rise linearly, H_v = pitch*v/V.

Lines are view-major, then detector row (3D), then detector column.
"""
import argparse
import math
from typing import Dict, List, TextIO

import numpy as np
import pydantic

from xrt.cli.common import positive_int
from xrt.core.exceptions import EXIT_OK, ValidationError, from_pydantic
from xrt.core.logging import get_logger
from xrt.io.rayset import format_rayset, write_rayset
from xrt.schemas.beams import GEOMETRY_TAGS, BeamSpec, beam_adapter
from xrt.schemas.grid import ImageGrid

logger = get_logger("cli.gen_rays")

GEOMETRY_DIMS = {
    "parallel2d": 2,
    "fan_equiangular": 2,
    "fan_equispaced": 2,
    "parallel3d": 3,
    "cone_equiangular": 3,
    "cone_equispaced": 3,
    "helical_equiangular": 3,
    "helical_equispaced": 3,
}


def detector_positions(half_width: float, count: int) -> List[float]:
    """``count`` uniform positions over [-half_width, half_width], endpoints included."""
    if count == 1:
        return [0.0]
    return np.linspace(-half_width, half_width, count).tolist()


def generate_beams(
    geometry: str,
    views: int,
    dets: int,
    rows: int = 1,
    s_max: float = 1.0,
    distance: float = 4.0,
    gamma_max: float = 0.5,
    t_max: float = 1.0,
    alpha_max: float = 0.5,
    beta_max: float = 0.5,
    h_max: float = 1.0,
    pitch: float = 0.0,
    phi2: float = 0.0,
) -> List[BeamSpec]:
    """Beams of a standard acquisition in view-major, row, detector order."""
    if geometry not in GEOMETRY_TAGS:
        raise ValidationError(f"unknown geometry '{geometry}'", field="geometry")
    for name, count in (("views", views), ("dets", dets), ("rows", rows)):
        if count < 1:
            raise ValidationError(f"{name} must be at least 1, got {count}", field=name)
    dim = GEOMETRY_DIMS[geometry]
    row_count = rows if dim == 3 else 1

    records: List[Dict[str, object]] = []
    for v in range(views):
        turn = math.pi * v / views if geometry == "parallel2d" else 2 * math.pi * v / views
        lift = pitch * v / views
        for r in range(row_count):
            for k in range(dets):
                records.append(
                    _beam_fields(
                        geometry, turn, lift, k, dets, r, row_count,
                        s_max, distance, gamma_max, t_max, alpha_max, beta_max, h_max, phi2,
                    )
                )

    try:
        return [beam_adapter.validate_python(record) for record in records]
    except pydantic.ValidationError as exc:
        raise from_pydantic(exc, f"gen-rays {geometry}") from exc


def _beam_fields(
    geometry, turn, lift, k, dets, r, rows, s_max, distance, gamma_max, t_max, alpha_max, beta_max, h_max, phi2
) -> Dict[str, object]:
    column = detector_positions(1.0, dets)[k]
    row = detector_positions(1.0, rows)[r]
    if geometry == "parallel2d":
        return {"geometry": geometry, "s": s_max * column, "phi": turn}
    if geometry == "fan_equiangular":
        return {"geometry": geometry, "D": distance, "alpha": turn, "gamma": gamma_max * column, "gamma_max": gamma_max}
    if geometry == "fan_equispaced":
        return {"geometry": geometry, "D": distance, "alpha": turn, "t": t_max * column, "t_max": t_max}
    if geometry == "parallel3d":
        return {"geometry": geometry, "s1": s_max * column, "s2": s_max * row, "phi1": turn, "phi2": phi2}

    fields: Dict[str, object] = {"geometry": geometry, "D": distance, "phi1p": turn}
    if geometry.endswith("equiangular"):
        fields.update(alpha=alpha_max * column, beta=beta_max * row)
    else:
        fields.update(t=t_max * column, h=h_max * row)
    if geometry.startswith("helical"):
        fields["H"] = lift
    return fields


def run(args: argparse.Namespace, stdout: TextIO) -> int:
    dim = GEOMETRY_DIMS[args.geometry]
    if dim == 3 and args.nz is None:
        raise ValidationError(f"{args.geometry} needs --nz", field="nz")
    try:
        grid = ImageGrid(nx=args.nx, ny=args.ny, nz=args.nz if dim == 3 else None, scale=args.scale)
    except pydantic.ValidationError as exc:
        raise from_pydantic(exc, "grid") from exc

    beams = generate_beams(
        args.geometry,
        args.views,
        args.dets,
        rows=args.rows,
        s_max=args.s_max,
        distance=args.distance,
        gamma_max=args.gamma_max,
        t_max=args.t_max,
        alpha_max=args.alpha_max,
        beta_max=args.beta_max,
        h_max=args.h_max,
        pitch=args.pitch,
        phi2=args.phi2,
    )
    logger.info("Rays generated", extra={"geometry": args.geometry, "ray_count": len(beams)})
    if args.out:
        write_rayset(args.out, grid, beams)
    else:
        stdout.write(format_rayset(grid, beams))
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "gen-rays",
        help="Generate a standard acquisition",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--geometry", required=True, choices=GEOMETRY_TAGS)
    parser.add_argument("--views", type=positive_int, required=True, help="Number of views V")
    parser.add_argument("--dets", type=positive_int, required=True, help="Detector columns K")
    parser.add_argument("--rows", type=positive_int, default=1, help="Detector rows R (3D geometries)")
    parser.add_argument("--nx", type=positive_int, required=True)
    parser.add_argument("--ny", type=positive_int, required=True)
    parser.add_argument("--nz", type=positive_int, default=None)
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--s-max", type=float, default=1.0, help="Parallel offset half-range")
    parser.add_argument("--distance", type=float, default=4.0, help="Source distance D")
    parser.add_argument("--gamma-max", type=float, default=0.5, help="Fan half-angle (radians)")
    parser.add_argument("--t-max", type=float, default=1.0, help="Flat detector half-width")
    parser.add_argument("--alpha-max", type=float, default=0.5, help="Cone in-plane half-angle (radians)")
    parser.add_argument("--beta-max", type=float, default=0.5, help="Cone vertical half-angle (radians)")
    parser.add_argument("--h-max", type=float, default=1.0, help="Flat detector half-height")
    parser.add_argument("--pitch", type=float, default=0.0, help="Helical rise over all views")
    parser.add_argument("--phi2", type=float, default=0.0, help="parallel3d elevation angle (radians)")
    parser.add_argument("--out", default=None, help="Output file (standard output when omitted)")
    parser.set_defaults(func=run)
