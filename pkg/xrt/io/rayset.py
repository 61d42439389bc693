"""
Ray-set text format.

One record per line: a tag followed by ``key=value`` pairs. ``#`` starts a
comment. The first record must be the grid::

    grid nx=3 ny=3 scale=1.0
    parallel2d s=1 phi=0.7853981633974483
    fan_equiangular D=4 alpha=1.5707963267948966 gamma=-0.5235987755982988

Angles are radians unless the caller asks for degree conversion.
"""
import math
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import pydantic

from xrt.core.exceptions import ConfigParseError, StorageError
from xrt.core.logging import get_logger
from xrt.schemas.beams import ANGLE_KEYS, GEOMETRY_TAGS, BeamSpec, beam_adapter
from xrt.schemas.grid import ImageGrid
from xrt.services.projector import RaySet

logger = get_logger("io.rayset")

GRID_TAG = "grid"
_GRID_INT_KEYS = ("nx", "ny", "nz")
_GRID_FLOAT_KEYS = ("scale", "cx", "cy", "cz")


def _pairs(tokens: List[str], line_number: int) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise ConfigParseError(f"expected key=value, got '{token}'", line_number)
        if key in pairs:
            raise ConfigParseError(f"duplicate key '{key}'", line_number)
        pairs[key] = value
    return pairs


def _number(key: str, value: str, line_number: int, integer: bool = False) -> Union[int, float]:
    try:
        return int(value) if integer else float(value)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ConfigParseError(f"{key}={value} is not {kind}", line_number) from None


def _pydantic_reason(exc: pydantic.ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()) if part not in GEOMETRY_TAGS)
    return f"{location}: {first['msg']}" if location else first["msg"]


def parse_grid_line(pairs: Dict[str, str], line_number: int) -> ImageGrid:
    unknown = sorted(set(pairs) - set(_GRID_INT_KEYS) - set(_GRID_FLOAT_KEYS))
    if unknown:
        raise ConfigParseError(f"unknown grid keys {unknown}", line_number)
    for key in ("nx", "ny"):
        if key not in pairs:
            raise ConfigParseError(f"grid requires {key}", line_number)

    fields: Dict[str, object] = {
        key: _number(key, pairs[key], line_number, integer=True) for key in _GRID_INT_KEYS if key in pairs
    }
    if "scale" in pairs:
        fields["scale"] = _number("scale", pairs["scale"], line_number)
    axes = ("cx", "cy", "cz") if "nz" in pairs else ("cx", "cy")
    if any(key in pairs for key in ("cx", "cy", "cz")):
        if "cz" in pairs and "nz" not in pairs:
            raise ConfigParseError("cz given for a 2D grid", line_number)
        fields["center"] = tuple(_number(key, pairs.get(key, "0"), line_number) for key in axes)
    try:
        return ImageGrid(**fields)
    except pydantic.ValidationError as exc:
        raise ConfigParseError(_pydantic_reason(exc), line_number) from exc


def parse_beam_line(tag: str, pairs: Dict[str, str], line_number: int, degrees: bool = False) -> BeamSpec:
    if tag not in GEOMETRY_TAGS:
        raise ConfigParseError(f"unknown geometry tag '{tag}'", line_number)
    fields: Dict[str, object] = {"geometry": tag}
    for key, value in pairs.items():
        number = _number(key, value, line_number)
        fields[key] = math.radians(number) if degrees and key in ANGLE_KEYS else number
    try:
        return beam_adapter.validate_python(fields)
    except pydantic.ValidationError as exc:
        raise ConfigParseError(_pydantic_reason(exc), line_number) from exc


def parse_rayset(text: str, degrees: bool = False) -> Tuple[ImageGrid, RaySet]:
    """
    Parse a ray-set configuration.

    Args:
        text: Configuration text
        degrees: Read angle parameters as degrees

    Returns:
        The grid and the ray set in file order

    Raises:
        ConfigParseError: For the first malformed line
    """
    grid = None
    beams: List[BeamSpec] = []
    last_line = 0
    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tag, *tokens = content.split()
        pairs = _pairs(tokens, line_number)
        if tag == GRID_TAG:
            if grid is not None:
                raise ConfigParseError("grid declared twice", line_number)
            grid = parse_grid_line(pairs, line_number)
            continue
        if grid is None:
            raise ConfigParseError("the first record must be the grid line", line_number)
        beam = parse_beam_line(tag, pairs, line_number, degrees)
        if beam.dim != grid.dim:
            raise ConfigParseError(f"{beam.dim}D geometry '{tag}' on a {grid.dim}D grid", line_number)
        beams.append(beam)

    if grid is None:
        raise ConfigParseError("missing grid line", max(last_line, 1))
    logger.debug("Ray set parsed", extra={"grid": str(grid), "ray_count": len(beams)})
    return grid, RaySet(grid, tuple(beams))


def _format_value(value: Union[int, float]) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


def format_grid(grid: ImageGrid) -> str:
    parts = [GRID_TAG, f"nx={grid.nx}", f"ny={grid.ny}"]
    if grid.nz is not None:
        parts.append(f"nz={grid.nz}")
    parts.append(f"scale={_format_value(grid.scale)}")
    if not grid.is_centered:
        parts += [f"{key}={_format_value(value)}" for key, value in zip(("cx", "cy", "cz"), grid.center)]
    return " ".join(parts)


def format_beam(beam: BeamSpec) -> str:
    values = beam.model_dump(exclude={"geometry"}, exclude_none=True)
    return " ".join([beam.geometry] + [f"{key}={_format_value(value)}" for key, value in values.items()])


def format_rayset(grid: ImageGrid, beams: Iterable[BeamSpec]) -> str:
    """Text that ``parse_rayset`` reads back to the same grid and beams."""
    return "\n".join([format_grid(grid)] + [format_beam(beam) for beam in beams]) + "\n"


def read_rayset(path: Union[str, Path], degrees: bool = False) -> Tuple[ImageGrid, RaySet]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(exc.strerror or str(exc), path=str(path)) from exc
    return parse_rayset(text, degrees)


def write_rayset(path: Union[str, Path], grid: ImageGrid, beams: Iterable[BeamSpec]) -> None:
    try:
        Path(path).write_text(format_rayset(grid, beams), encoding="utf-8")
    except OSError as exc:
        raise StorageError(exc.strerror or str(exc), path=str(path)) from exc
