"""
Index conventions and grid normalization.

Canonical coordinates put the grid center at the origin with unit-sized
pixels/voxels; x grows with ``i`` while y and z shrink with ``j`` and ``k``.
"""
import math
from typing import Tuple, Union

from xrt.core.exceptions import BoundsError, ValidationError
from xrt.schemas.beams import ParallelRay2D, ParallelRay3D
from xrt.schemas.grid import ImageGrid, UnitIndex2D, UnitIndex3D
from xrt.services.geometry import direction_basis_3d

UnitIndex = Union[UnitIndex2D, UnitIndex3D]
ParallelRay = Union[ParallelRay2D, ParallelRay3D]


def _check_dim(idx: UnitIndex, grid: ImageGrid) -> None:
    expected = 3 if isinstance(idx, UnitIndex3D) else 2
    if grid.dim != expected:
        raise ValidationError(f"{expected}D index used with a {grid.dim}D grid", field="idx")


def _check_bounds(idx: UnitIndex, grid: ImageGrid) -> None:
    _check_dim(idx, grid)
    if not (0 <= idx.i < grid.nx and 0 <= idx.j < grid.ny):
        raise BoundsError(f"index {idx!r} outside {grid}", field="idx")
    if isinstance(idx, UnitIndex3D) and not 0 <= idx.k < grid.nz:
        raise BoundsError(f"index {idx!r} outside {grid}", field="idx")


def flat_index(idx: UnitIndex, grid: ImageGrid) -> int:
    """Flat position of a pixel (j*nx + i) or voxel (k*ny*nx + j*nx + i)."""
    _check_bounds(idx, grid)
    flat = idx.j * grid.nx + idx.i
    if isinstance(idx, UnitIndex3D):
        flat += idx.k * grid.ny * grid.nx
    return flat


def unflat_index(flat: int, grid: ImageGrid) -> UnitIndex:
    if not 0 <= flat < grid.size:
        raise BoundsError(f"flat index {flat} outside [0, {grid.size})", field="flat")
    rest, i = divmod(flat, grid.nx)
    if grid.dim == 2:
        return UnitIndex2D(j=rest, i=i)
    k, j = divmod(rest, grid.ny)
    return UnitIndex3D(k=k, j=j, i=i)


def unit_center(idx: UnitIndex, grid: ImageGrid) -> Tuple[float, ...]:
    """Center of a unit in canonical coordinates."""
    _check_bounds(idx, grid)
    x = idx.i - (grid.nx - 1) / 2
    y = (grid.ny - 1) / 2 - idx.j
    if isinstance(idx, UnitIndex3D):
        return (x, y, (grid.nz - 1) / 2 - idx.k)
    return (x, y)


def physical_center(idx: UnitIndex, grid: ImageGrid) -> Tuple[float, ...]:
    return tuple(c * grid.scale + offset for c, offset in zip(unit_center(idx, grid), grid.center))


def normalize_to_canonical(ray: ParallelRay, grid: ImageGrid) -> Tuple[ParallelRay, float]:
    """
    Map a physical-space ray onto the canonical grid.

    Returns the canonical ray and the factor that turns canonical
    intersection lengths back into physical ones.
    """
    if ray.dim != grid.dim:
        raise ValidationError(f"{ray.dim}D ray used with a {grid.dim}D grid", field="ray")
    if grid.scale == 1.0 and grid.is_centered:
        return ray, 1.0

    if isinstance(ray, ParallelRay2D):
        perp = ray.theta_perp
        shift = grid.center[0] * perp[0] + grid.center[1] * perp[1]
        canonical = ParallelRay2D(s=(ray.s - shift) / grid.scale, phi=ray.phi)
        return canonical, grid.scale

    _, theta1, theta2 = direction_basis_3d(ray.phi1, ray.phi2)
    shift1 = math.fsum(c * b for c, b in zip(grid.center, theta1))
    shift2 = math.fsum(c * b for c, b in zip(grid.center, theta2))
    canonical = ParallelRay3D(
        s1=(ray.s1 - shift1) / grid.scale,
        s2=(ray.s2 - shift2) / grid.scale,
        phi1=ray.phi1,
        phi2=ray.phi2,
    )
    return canonical, grid.scale
