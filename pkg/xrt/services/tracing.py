"""
Shared ray/grid sweep used by the 2D and 3D intersection kernels.

Each grid axis is described in index space: along the ray the axis
coordinate is ``u(t) = offset + slope * t`` and cell ``m`` spans
``u in [m, m + 1]``. The sweep loops over every cell of the axis the ray
advances fastest along and, inside each cell, only visits the few cells of
the remaining axes whose index range the current parameter interval can
reach. Every visited unit is confirmed by the strict test ``c_low < c_up``.

The sweep is compiled with numba and releases the GIL, so rows computed on
worker threads run concurrently. Passing a work array compiles a separate
counting specialization; with ``work=None`` the counting branch is pruned.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow, WorkCounter

# Direction components below this are treated as exactly parallel to the axis.
EPS_AXIS = 1e-12
# Distance from a grid line under which a parallel ray is considered on it.
EPS_TIE = 1e-12
# Lengths at or below this are floating-point residue of tangential contact.
EMIT_THRESHOLD = 1e-12


@njit(nogil=True, cache=True)
def _cell_interval(offset, slope, m):
    a = (m - offset) / slope
    b = (m + 1 - offset) / slope
    if a <= b:
        return a, b
    return b, a


@njit(nogil=True, cache=True)
def _cell_range(offset, slope, count, t_lo, t_hi):
    u_a = offset + slope * t_lo
    u_b = offset + slope * t_hi
    lo = min(u_a, u_b)
    hi = max(u_a, u_b)
    return max(0, int(math.floor(lo))), min(count - 1, int(math.ceil(hi)) - 1)


@njit(nogil=True, cache=True)
def _emit(out_index, out_length, n, at, length):
    if length <= EMIT_THRESHOLD:
        return n
    if n >= out_index.shape[0]:
        raise IndexError("row buffer overflow")
    out_index[n] = at
    out_length[n] = length
    return n + 1


@njit(nogil=True, cache=True)
def _sweep(offsets, slopes, counts, strides, base, out_index, out_length, work):
    """
    Fill ``out_index``/``out_length`` with the units a ray crosses.

    Axes arrive ordered by decreasing |slope| and none is fixed. Returns the
    number of records written, in visiting order.
    """
    dims = offsets.shape[0]
    n = 0
    for m0 in range(counts[0]):
        lo0, hi0 = _cell_interval(offsets[0], slopes[0], m0)
        at0 = base + m0 * strides[0]
        if dims == 1:
            if work is not None:
                work[0] += 1
            n = _emit(out_index, out_length, n, at0, hi0 - lo0)
            continue
        first1, last1 = _cell_range(offsets[1], slopes[1], counts[1], lo0, hi0)
        for m1 in range(first1, last1 + 1):
            enter1, leave1 = _cell_interval(offsets[1], slopes[1], m1)
            lo1 = max(lo0, enter1)
            hi1 = min(hi0, leave1)
            at1 = at0 + m1 * strides[1]
            if dims == 2:
                if work is not None:
                    work[0] += 1
                n = _emit(out_index, out_length, n, at1, hi1 - lo1)
                continue
            if hi1 <= lo1:
                continue
            first2, last2 = _cell_range(offsets[2], slopes[2], counts[2], lo1, hi1)
            for m2 in range(first2, last2 + 1):
                enter2, leave2 = _cell_interval(offsets[2], slopes[2], m2)
                lo2 = max(lo1, enter2)
                hi2 = min(hi1, leave2)
                if work is not None:
                    work[0] += 1
                n = _emit(out_index, out_length, n, at1 + m2 * strides[2], hi2 - lo2)
    return n


@dataclass(frozen=True)
class AxisTrack:
    """The ray seen along one grid axis, in cell-index units."""

    offset: float
    slope: float
    count: int
    stride: int

    @property
    def is_fixed(self) -> bool:
        return abs(self.slope) < EPS_AXIS

    def cell_interval(self, m: int) -> Tuple[float, float]:
        """Ray parameters where the ray enters and leaves the slab of cell ``m``."""
        return _cell_interval(float(self.offset), float(self.slope), m)

    def cells_between(self, t_lo: float, t_hi: float) -> Tuple[int, int]:
        """Inclusive range of cells the ray can occupy for t in (t_lo, t_hi)."""
        return _cell_range(float(self.offset), float(self.slope), self.count, float(t_lo), float(t_hi))


def axis_tracks(point: Sequence[float], direction: Sequence[float], grid: ImageGrid) -> List[AxisTrack]:
    """
    Index-space tracks for the x, y (and z) axes of a canonical grid.

    x grows with i; y and z shrink with j and k.
    """
    tracks = [
        AxisTrack(point[0] + grid.nx / 2, direction[0], grid.nx, 1),
        AxisTrack(grid.ny / 2 - point[1], -direction[1], grid.ny, grid.nx),
    ]
    if grid.dim == 3:
        tracks.append(AxisTrack(grid.nz / 2 - point[2], -direction[2], grid.nz, grid.nx * grid.ny))
    return tracks


def grid_line_index(offset: float, count: int) -> Optional[int]:
    """
    Cell holding a ray parallel to an axis at index-space position ``offset``.

    A ray lying on the line between two cells goes to the larger index.
    """
    nearest = round(offset)
    if abs(offset - nearest) <= EPS_TIE:
        if 0 <= nearest < count:
            return nearest
        if nearest == count:
            return count - 1
        return None
    cell = math.floor(offset)
    return cell if 0 <= cell < count else None


def unit_run(track: AxisTrack, base: int, counter: Optional[WorkCounter] = None) -> SparseRow:
    """Every cell along ``track`` with unit length."""
    if counter is not None:
        counter.add(track.count)
    indices = base + track.stride * np.arange(track.count, dtype=np.int64)
    return SparseRow(np.sort(indices), np.ones(track.count, dtype=np.float64))


def trace(tracks: Sequence[AxisTrack], base: int = 0, counter: Optional[WorkCounter] = None) -> SparseRow:
    """
    Intersection lengths of a ray against all cells spanned by ``tracks``.

    All tracks must be moving (non-parallel). ``base`` is the flat-index
    contribution of any fixed axes.
    """
    ordered = sorted(tracks, key=lambda track: -abs(track.slope))
    offsets = np.array([track.offset for track in ordered], dtype=np.float64)
    slopes = np.array([track.slope for track in ordered], dtype=np.float64)
    counts = np.array([track.count for track in ordered], dtype=np.int64)
    strides = np.array([track.stride for track in ordered], dtype=np.int64)

    # a line crosses at most sum(counts) units
    capacity = int(counts.sum()) + len(ordered)
    out_index = np.empty(capacity, dtype=np.int64)
    out_length = np.empty(capacity, dtype=np.float64)

    if counter is None:
        n = _sweep(offsets, slopes, counts, strides, int(base), out_index, out_length, None)
    else:
        work = np.zeros(1, dtype=np.int64)
        n = _sweep(offsets, slopes, counts, strides, int(base), out_index, out_length, work)
        counter.add(int(work[0]))

    if n == 0:
        return SparseRow.empty()
    order = np.argsort(out_index[:n], kind="stable")
    return SparseRow(out_index[:n][order], out_length[:n][order])
