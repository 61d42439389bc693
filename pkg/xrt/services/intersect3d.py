"""
Intersection rows for canonical 3D parallel rays.

Rays are routed by how many axes they are parallel to: none (general
sweep), one (the ray lies in a fixed slab) or two (a single line of voxels).
"""
from typing import List, Optional

from xrt.core.exceptions import ValidationError
from xrt.schemas.beams import ParallelRay3D
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow, WorkCounter
from xrt.services.geometry import ray_line
from xrt.services.tracing import AxisTrack, axis_tracks, grid_line_index, trace, unit_run


def _tracks(ray: ParallelRay3D, grid: ImageGrid) -> List[AxisTrack]:
    if grid.dim != 3:
        raise ValidationError(f"3D ray used with a {grid.dim}D grid", field="grid")
    point, direction = ray_line(ray)
    return axis_tracks(point, direction, grid)


def _fixed_base(fixed: List[AxisTrack]) -> Optional[int]:
    base = 0
    for track in fixed:
        cell = grid_line_index(track.offset, track.count)
        if cell is None:
            return None
        base += cell * track.stride
    return base


def plane_parallel_row_3d(
    ray: ParallelRay3D, grid: ImageGrid, counter: Optional[WorkCounter] = None
) -> SparseRow:
    """Row of a ray parallel to exactly one coordinate axis's slab."""
    tracks = _tracks(ray, grid)
    fixed = [track for track in tracks if track.is_fixed]
    if len(fixed) != 1:
        raise ValidationError("ray is not parallel to exactly one grid plane", field="ray")
    base = _fixed_base(fixed)
    if base is None:
        return SparseRow.empty()
    return trace([track for track in tracks if not track.is_fixed], base, counter)


def axis_parallel_row_3d(
    ray: ParallelRay3D, grid: ImageGrid, counter: Optional[WorkCounter] = None
) -> SparseRow:
    """Row of a ray parallel to a coordinate axis: unit lengths along one voxel line."""
    tracks = _tracks(ray, grid)
    fixed = [track for track in tracks if track.is_fixed]
    if len(fixed) != 2:
        raise ValidationError("ray is not parallel to a coordinate axis", field="ray")
    base = _fixed_base(fixed)
    if base is None:
        return SparseRow.empty()
    moving = next(track for track in tracks if not track.is_fixed)
    return unit_run(moving, base, counter)


def intersect_row_3d(
    ray: ParallelRay3D, grid: ImageGrid, counter: Optional[WorkCounter] = None
) -> SparseRow:
    """
    Intersection lengths of a canonical ray with every voxel it crosses.

    Args:
        ray: Canonical ray, phi1 in [0, 2pi), phi2 in [0, pi/2]
        grid: Canonical (unit-scale, centered) 3D grid
        counter: Collects the number of voxels examined when given

    Returns:
        Row sorted by flat index; empty when the ray misses the grid
    """
    if counter is not None:
        counter.start_row()
    tracks = _tracks(ray, grid)
    n_fixed = sum(track.is_fixed for track in tracks)
    if n_fixed == 2:
        return axis_parallel_row_3d(ray, grid, counter)
    if n_fixed == 1:
        return plane_parallel_row_3d(ray, grid, counter)
    return trace(tracks, 0, counter)
