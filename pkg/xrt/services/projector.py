"""
Forward projection, backprojection and projection-matrix assembly.

Rows are independent and may be computed on a thread pool; the compiled
sweep releases the GIL, so workers overlap. Rows are always combined in ray
order on the calling thread, so results do not depend on the worker count.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator

from xrt.core.config import get_settings
from xrt.core.exceptions import ValidationError
from xrt.core.logging import LoggingContext, get_logger, log_performance
from xrt.schemas.beams import BeamSpec, ParallelRay2D, ParallelRay3D
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow, WorkCounter
from xrt.services.geometry import beam_to_parallel, canonicalize
from xrt.services.grid import normalize_to_canonical
from xrt.services.intersect2d import intersect_row_2d
from xrt.services.intersect3d import intersect_row_3d

logger = get_logger("projector")

ParallelRay = Union[ParallelRay2D, ParallelRay3D]


def _finite_vector(values, expected: int, what: str) -> np.ndarray:
    array = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    if array.size != expected:
        raise ValidationError(f"{what} has {array.size} values, expected {expected}", field=what)
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{what} contains non-finite values", field=what)
    return array


@dataclass(frozen=True)
class Image:
    """Unit values on a grid in flat-index order."""

    grid: ImageGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _finite_vector(self.values, self.grid.size, "image"))

    @classmethod
    def zeros(cls, grid: ImageGrid) -> "Image":
        return cls(grid, np.zeros(grid.size))

    def as_array(self) -> np.ndarray:
        """Values reshaped to ``grid.shape``."""
        return self.values.reshape(self.grid.shape)


@dataclass(frozen=True)
class Sinogram:
    """Line-integral values in ray order."""

    values: np.ndarray

    def __post_init__(self):
        array = np.ascontiguousarray(self.values, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "values", _finite_vector(array, array.size, "sinogram"))

    @property
    def ray_count(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class RaySet:
    """Ordered beam specifications sharing one grid."""

    grid: ImageGrid
    beams: Tuple[BeamSpec, ...]

    def __post_init__(self):
        beams = tuple(self.beams)
        for position, beam in enumerate(beams):
            if beam.dim != self.grid.dim:
                raise ValidationError(
                    f"ray {position} is a {beam.dim}D {beam.geometry} beam on a {self.grid.dim}D grid",
                    field="beams",
                )
        object.__setattr__(self, "beams", beams)

    def __len__(self) -> int:
        return len(self.beams)

    def __iter__(self):
        return iter(self.beams)


@dataclass(frozen=True)
class ProjectionMatrix:
    """Stacked sparse rows in ray order; stored lengths are already physical."""

    rows: Tuple[SparseRow, ...]
    n_cols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for row in self.rows:
            row.validate(self.n_cols)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def matvec(self, x) -> np.ndarray:
        x = _finite_vector(x, self.n_cols, "image")
        out = np.zeros(self.n_rows)
        for m, row in enumerate(self.rows):
            if len(row):
                out[m] = np.dot(row.lengths, x[row.indices])
        return out

    def rmatvec(self, y) -> np.ndarray:
        y = _finite_vector(y, self.n_rows, "sinogram")
        out = np.zeros(self.n_cols)
        # indices are unique within a row, so fancy-index accumulation is exact
        for m, row in enumerate(self.rows):
            if len(row):
                out[row.indices] += row.lengths * y[m]
        return out

    def to_csr(self) -> sparse.csr_matrix:
        indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(row) for row in self.rows])
        if self.rows:
            indices = np.concatenate([row.indices for row in self.rows])
            data = np.concatenate([row.lengths for row in self.rows])
        else:
            indices = np.empty(0, dtype=np.int64)
            data = np.empty(0, dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=self.shape)

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.matvec, rmatvec=self.rmatvec, dtype=np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectionMatrix):
            return NotImplemented
        return self.n_cols == other.n_cols and self.rows == other.rows

    __hash__ = None  # type: ignore[assignment]


def resolve_ray(spec: BeamSpec, grid: ImageGrid) -> Tuple[ParallelRay, float]:
    """
    Canonical ray for a beam on a grid, plus the length rescale factor.

    The beam is converted to parallel parameters, reduced to the canonical
    angle ranges and moved onto the unit-scale, origin-centered grid.
    """
    if spec.dim != grid.dim:
        raise ValidationError(f"{spec.dim}D {spec.geometry} beam on a {grid.dim}D grid", field="geometry")
    ray = canonicalize(beam_to_parallel(spec))
    return normalize_to_canonical(ray, grid)


def intersect_row(ray: ParallelRay, grid: ImageGrid, counter: Optional[WorkCounter] = None) -> SparseRow:
    """Canonical row for a canonical ray; only the grid's unit counts are used."""
    if isinstance(ray, ParallelRay2D):
        return intersect_row_2d(ray, grid, counter)
    return intersect_row_3d(ray, grid, counter)


def compute_row(spec: BeamSpec, grid: ImageGrid, counter: Optional[WorkCounter] = None) -> SparseRow:
    """Physical-length row for one beam."""
    ray, factor = resolve_ray(spec, grid)
    return intersect_row(ray, grid, counter).scaled(factor)


def _resolve_threads(threads: Optional[int]) -> int:
    threads = get_settings().DEFAULT_THREADS if threads is None else threads
    if threads < 1:
        raise ValidationError(f"thread count must be at least 1, got {threads}", field="threads")
    return threads


def _compute_rows(beams: Sequence[BeamSpec], grid: ImageGrid, threads: int) -> List[SparseRow]:
    if threads == 1 or len(beams) < 2:
        return [compute_row(beam, grid) for beam in beams]
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="xrt-row") as pool:
        # map yields in submission order
        return list(pool.map(lambda beam: compute_row(beam, grid), beams))


def _check_grid(rays: RaySet, grid: Optional[ImageGrid]) -> ImageGrid:
    if grid is not None and grid != rays.grid:
        raise ValidationError(f"grid {grid} does not match the ray set grid {rays.grid}", field="grid")
    return rays.grid


@log_performance("assemble_matrix", threshold_ms=5000.0)
def assemble_matrix(
    rays: RaySet,
    grid: Optional[ImageGrid] = None,
    threads: Optional[int] = None,
    counter: Optional[WorkCounter] = None,
) -> ProjectionMatrix:
    """
    Projection matrix with one row per ray in ray-set order.

    Args:
        rays: Beams and their grid
        grid: Optional grid, must equal ``rays.grid``
        threads: Worker count (settings default when None)
        counter: Collects candidate counts; forces a single worker

    Raises:
        ValidationError: On grid mismatch or invalid beams
    """
    grid = _check_grid(rays, grid)
    threads = _resolve_threads(threads)
    with LoggingContext("assemble_matrix", logger, ray_count=len(rays), grid=str(grid), threads=threads):
        if counter is not None:
            rows = [compute_row(beam, grid, counter) for beam in rays.beams]
        else:
            rows = _compute_rows(rays.beams, grid, threads)
        matrix = ProjectionMatrix(tuple(rows), grid.size)
    logger.debug("Matrix assembled", extra={"n_rows": matrix.n_rows, "nnz": matrix.nnz})
    return matrix


@log_performance("forward_project", threshold_ms=5000.0)
def forward_project(image: Image, rays: RaySet, threads: Optional[int] = None) -> Sinogram:
    """Line integrals of ``image`` along every ray, in ray order."""
    if image.grid != rays.grid:
        raise ValidationError(f"image grid {image.grid} does not match ray set grid {rays.grid}", field="grid")
    matrix = assemble_matrix(rays, threads=threads)
    return Sinogram(matrix.matvec(image.values))


@log_performance("back_project", threshold_ms=5000.0)
def back_project(sino: Sinogram, rays: RaySet, grid: Optional[ImageGrid] = None, threads: Optional[int] = None) -> Image:
    """Adjoint of ``forward_project``: scatter each ray's value along its row."""
    grid = _check_grid(rays, grid)
    if sino.ray_count != len(rays):
        raise ValidationError(f"sinogram has {sino.ray_count} values for {len(rays)} rays", field="sinogram")
    matrix = assemble_matrix(rays, threads=threads)
    return Image(grid, matrix.rmatvec(sino.values))


def project_rows(beams: Iterable[BeamSpec], grid: ImageGrid, threads: Optional[int] = None) -> List[SparseRow]:
    """Rows for an arbitrary beam sequence without building a ray set."""
    return _compute_rows(list(beams), grid, _resolve_threads(threads))
