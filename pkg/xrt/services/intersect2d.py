"""Intersection rows for canonical 2D parallel rays."""
from typing import Optional

from xrt.core.exceptions import ValidationError
from xrt.schemas.beams import ParallelRay2D
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow, WorkCounter
from xrt.services.geometry import ray_line
from xrt.services.tracing import axis_tracks, grid_line_index, trace, unit_run


def _tracks(ray: ParallelRay2D, grid: ImageGrid):
    if grid.dim != 2:
        raise ValidationError(f"2D ray used with a {grid.dim}D grid", field="grid")
    point, direction = ray_line(ray)
    return axis_tracks(point, direction, grid)


def axis_parallel_row_2d(
    ray: ParallelRay2D, grid: ImageGrid, counter: Optional[WorkCounter] = None
) -> SparseRow:
    """
    Row of a ray parallel to the x- or y-axis.

    The ray crosses a single row or column with unit length per pixel; on a
    grid line the row or column with the larger index is used.
    """
    tracks = _tracks(ray, grid)
    fixed = [track for track in tracks if track.is_fixed]
    moving = [track for track in tracks if not track.is_fixed]
    if len(fixed) != 1:
        raise ValidationError(f"ray (s={ray.s}, phi={ray.phi}) is not axis-parallel", field="phi")

    line = fixed[0]
    cell = grid_line_index(line.offset, line.count)
    if cell is None:
        return SparseRow.empty()
    return unit_run(moving[0], cell * line.stride, counter)


def intersect_row_2d(
    ray: ParallelRay2D, grid: ImageGrid, counter: Optional[WorkCounter] = None
) -> SparseRow:
    """
    Intersection lengths of a canonical ray with every pixel it crosses.

    Args:
        ray: Canonical ray, phi in [0, pi)
        grid: Canonical (unit-scale, centered) 2D grid
        counter: Collects the number of pixels examined when given

    Returns:
        Row sorted by flat index; empty when the ray misses the grid
    """
    if counter is not None:
        counter.start_row()
    tracks = _tracks(ray, grid)
    if any(track.is_fixed for track in tracks):
        return axis_parallel_row_2d(ray, grid, counter)
    return trace(tracks, 0, counter)
