"""
Brute-force reference rows.

Every pixel/voxel box is clipped against the ray independently with the
slab method; there is no index-range shortcut, so the cost is O(N^d). Rays
lying exactly on a grid line come back with both neighbouring units;
``apply_tie_break`` reduces such rows to the single-winner convention before
comparison.
"""
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from xrt.schemas.beams import HALF_PI, TWO_PI, ParallelRay2D, ParallelRay3D
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow
from xrt.services.geometry import ray_line

ParallelRay = Union[ParallelRay2D, ParallelRay3D]

PARALLEL_EPS = 1e-12
DROP_THRESHOLD = 1e-12
# Closed slab test for parallel rays, widened by rounding residue.
ON_LINE_SLACK = 1e-12


def _axis_edges(grid: ImageGrid, physical: bool) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Lower/upper box faces per axis (x, y[, z]) in slowest-last order of units."""
    counts = [grid.nx, grid.ny] + ([grid.nz] if grid.dim == 3 else [])
    edges = []
    for axis, n in enumerate(counts):
        cells = np.arange(n, dtype=np.float64)
        if axis == 0:
            lower = cells - n / 2
        else:
            lower = n / 2 - cells - 1
        upper = lower + 1.0
        if physical:
            lower = lower * grid.scale + grid.center[axis]
            upper = upper * grid.scale + grid.center[axis]
        edges.append((lower, upper))
    return edges


def _slab_intervals(
    lower: np.ndarray, upper: np.ndarray, origin: float, direction: float, slack: float = ON_LINE_SLACK
) -> Tuple[np.ndarray, np.ndarray]:
    if abs(direction) < PARALLEL_EPS:
        inside = (lower - slack <= origin) & (origin <= upper + slack)
        return np.where(inside, -np.inf, np.inf), np.where(inside, np.inf, -np.inf)
    a = (lower - origin) / direction
    b = (upper - origin) / direction
    return np.minimum(a, b), np.maximum(a, b)


def _broadcast_shape(axis: int, dim: int) -> Tuple[int, ...]:
    # x varies along the last array axis, y before it, z first
    shape = [1] * dim
    shape[dim - 1 - axis] = -1
    return tuple(shape)


def oracle_row(ray: ParallelRay, grid: ImageGrid, physical: bool = False) -> SparseRow:
    """
    Reference row by clipping the ray against every unit box.

    With ``physical`` the boxes are scaled by ``grid.scale`` and shifted by
    ``grid.center`` and the ray is read in physical coordinates.
    """
    point, direction = ray_line(ray)
    c_low: Optional[np.ndarray] = None
    c_up: Optional[np.ndarray] = None
    for axis, (lower, upper) in enumerate(_axis_edges(grid, physical)):
        t_lo, t_hi = _slab_intervals(lower, upper, point[axis], direction[axis])
        shape = _broadcast_shape(axis, grid.dim)
        t_lo, t_hi = t_lo.reshape(shape), t_hi.reshape(shape)
        c_low = t_lo if c_low is None else np.maximum(c_low, t_lo)
        c_up = t_hi if c_up is None else np.minimum(c_up, t_hi)

    lengths = np.maximum(c_up - c_low, 0.0).reshape(-1)
    keep = np.flatnonzero(lengths > DROP_THRESHOLD)
    return SparseRow(keep.astype(np.int64), lengths[keep])


def chord_length(ray: ParallelRay, grid: ImageGrid, physical: bool = False) -> float:
    """Length of the ray inside the whole domain box."""
    point, direction = ray_line(ray)
    counts = [grid.nx, grid.ny] + ([grid.nz] if grid.dim == 3 else [])
    c_low, c_up = -math.inf, math.inf
    for axis, n in enumerate(counts):
        lower, upper = np.array([-n / 2]), np.array([n / 2])
        if physical:
            lower = lower * grid.scale + grid.center[axis]
            upper = upper * grid.scale + grid.center[axis]
        t_lo, t_hi = _slab_intervals(lower, upper, point[axis], direction[axis])
        c_low = max(c_low, float(t_lo[0]))
        c_up = min(c_up, float(t_hi[0]))
    return max(c_up - c_low, 0.0)


def _index_offsets(ray: ParallelRay, grid: ImageGrid) -> List[Tuple[float, float]]:
    """(index-space position, direction component) per axis for a canonical ray."""
    point, direction = ray_line(ray)
    offsets = [(point[0] + grid.nx / 2, direction[0]), (grid.ny / 2 - point[1], direction[1])]
    if grid.dim == 3:
        offsets.append((grid.nz / 2 - point[2], direction[2]))
    return offsets


def apply_tie_break(row: SparseRow, ray: ParallelRay, grid: ImageGrid, tolerance: float = 1e-12) -> SparseRow:
    """
    Keep one unit per coincidence for rays on interior grid lines.

    Units on the smaller-index side of the line are relabelled to the
    larger-index neighbour, which wins when both are present.
    """
    if len(row) == 0:
        return row
    counts = [grid.nx, grid.ny] + ([grid.nz] if grid.dim == 3 else [])
    coords = list(np.unravel_index(row.indices, grid.shape))
    changed = False
    for axis, (offset, component) in enumerate(_index_offsets(ray, grid)):
        if abs(component) >= PARALLEL_EPS:
            continue
        line = round(offset)
        if abs(offset - line) > tolerance or not 1 <= line <= counts[axis] - 1:
            continue
        position = grid.dim - 1 - axis
        losers = coords[position] == line - 1
        if np.any(losers):
            coords[position] = np.where(losers, line, coords[position])
            changed = True
    if not changed:
        return row

    relabelled = np.ravel_multi_index(tuple(coords), grid.shape).astype(np.int64)
    # stable sort keeps an original winner ahead of a relabelled duplicate
    is_original = relabelled == row.indices
    order = np.lexsort((~is_original, relabelled))
    relabelled, lengths = relabelled[order], row.lengths[order]
    unique, first = np.unique(relabelled, return_index=True)
    return SparseRow(unique, lengths[first])


def compare_rows(row: SparseRow, reference: SparseRow, tolerance: float = 1e-9) -> Optional[str]:
    """Describe the first disagreement between two rows, or None when they match."""
    if not np.array_equal(row.indices, reference.indices):
        missing = sorted(set(reference.indices.tolist()) - set(row.indices.tolist()))
        extra = sorted(set(row.indices.tolist()) - set(reference.indices.tolist()))
        return f"index sets differ: missing {missing[:5]}, unexpected {extra[:5]}"
    if row.indices.size:
        worst = int(np.argmax(np.abs(row.lengths - reference.lengths)))
        delta = abs(row.lengths[worst] - reference.lengths[worst])
        if delta >= tolerance:
            return f"length at index {row.indices[worst]} differs by {delta:.3e}"
    return None


def _half_integer(rng: np.random.Generator, reach: float) -> float:
    return float(rng.integers(-int(2 * reach), int(2 * reach) + 1)) / 2


def sample_canonical_rays(
    dim: int, grid: ImageGrid, count: int, rng: np.random.Generator, special_every: int = 10
) -> List[ParallelRay]:
    """
    Random canonical rays covering the grid with a margin so some miss.

    Every ``special_every``-th ray is axis- or plane-parallel with offsets on
    the half-integer lattice, exercising the grid-line cases.
    """
    counts: Sequence[int] = [grid.nx, grid.ny] + ([grid.nz] if dim == 3 else [])
    reach = 0.55 * math.sqrt(sum(n * n for n in counts))
    rays: List[ParallelRay] = []
    for number in range(count):
        special = special_every > 0 and number % special_every == special_every - 1
        if dim == 2:
            if special:
                phi = float(rng.choice([0.0, HALF_PI]))
                rays.append(ParallelRay2D(s=_half_integer(rng, reach), phi=phi))
            else:
                rays.append(ParallelRay2D(s=float(rng.uniform(-reach, reach)), phi=float(rng.uniform(0.0, math.pi))))
            continue
        if special:
            phi1 = float(rng.choice([0.0, HALF_PI, math.pi, 3 * HALF_PI, float(rng.uniform(0.0, TWO_PI))]))
            phi2 = float(rng.choice([0.0, HALF_PI, float(rng.uniform(0.0, HALF_PI))]))
            rays.append(
                ParallelRay3D(s1=_half_integer(rng, reach), s2=_half_integer(rng, reach), phi1=phi1, phi2=phi2)
            )
        else:
            rays.append(
                ParallelRay3D(
                    s1=float(rng.uniform(-reach, reach)),
                    s2=float(rng.uniform(-reach, reach)),
                    phi1=float(rng.uniform(0.0, TWO_PI)),
                    phi2=float(rng.uniform(0.0, HALF_PI)),
                )
            )
    return rays
