"""
Little-endian binary formats for projection matrices and dense vectors.

Matrix file::

    b"XRTSPMAT" | u32 version | u64 n_rows | u64 n_cols | u64 total_nnz
    per row: u64 nnz, then nnz x (u64 index, f64 length)

Dense file::

    b"XRTDENSE" | u32 version | u32 dim | dim x u64 shape (slowest first) | f64 payload
"""
import io
import math
import struct
from pathlib import Path
from typing import BinaryIO, List, Optional, Tuple, Union

import numpy as np

from xrt.core.exceptions import FileFormatError, StorageError, ValidationError
from xrt.core.logging import get_logger
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow
from xrt.services.projector import Image, ProjectionMatrix, Sinogram

logger = get_logger("io.binary")

MATRIX_MAGIC = b"XRTSPMAT"
DENSE_MAGIC = b"XRTDENSE"
FORMAT_VERSION = 1

_MATRIX_HEADER = struct.Struct("<8sIQQQ")
_DENSE_PREFIX = struct.Struct("<8sII")
_U64 = struct.Struct("<Q")
_TOTAL_NNZ_OFFSET = 28
RECORD_DTYPE = np.dtype([("index", "<u8"), ("length", "<f8")])

PathLike = Union[str, Path]


class _Reader:
    """Reads exact byte counts and tracks the offset for error reports."""

    def __init__(self, handle: BinaryIO):
        self.handle = handle
        self.offset = 0
        start = handle.tell()
        self.size = handle.seek(0, io.SEEK_END) - start
        handle.seek(start)

    @property
    def remaining(self) -> int:
        return self.size - self.offset

    def read(self, size: int, what: str) -> bytes:
        if size > self.remaining:
            raise FileFormatError(f"truncated {what}: expected {size} bytes, got {self.remaining}", self.offset)
        data = self.handle.read(size)
        if len(data) != size:
            raise FileFormatError(f"truncated {what}: expected {size} bytes, got {len(data)}", self.offset)
        self.offset += size
        return data

    def expect_end(self) -> None:
        if self.handle.read(1):
            raise FileFormatError("unexpected trailing bytes", self.offset)


def _check_magic(magic: bytes, found: bytes, version: int) -> None:
    if found != magic:
        raise FileFormatError(f"bad magic {found!r}, expected {magic!r}", 0)
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported version {version}", len(magic))


def dump_matrix(handle: BinaryIO, matrix: ProjectionMatrix) -> int:
    """Write a matrix; returns the number of bytes written."""
    written = handle.write(
        _MATRIX_HEADER.pack(MATRIX_MAGIC, FORMAT_VERSION, matrix.n_rows, matrix.n_cols, matrix.nnz)
    )
    for row in matrix.rows:
        records = np.empty(len(row), dtype=RECORD_DTYPE)
        records["index"] = row.indices
        records["length"] = row.lengths
        written += handle.write(_U64.pack(len(row)))
        written += handle.write(records.tobytes())
    return written


def load_matrix(handle: BinaryIO) -> ProjectionMatrix:
    """Read and validate a matrix file."""
    reader = _Reader(handle)
    magic, version, n_rows, n_cols, total_nnz = _MATRIX_HEADER.unpack(reader.read(_MATRIX_HEADER.size, "header"))
    _check_magic(MATRIX_MAGIC, magic, version)
    if total_nnz > n_rows * n_cols:
        raise FileFormatError(
            f"declared total of {total_nnz} entries exceeds {n_rows}x{n_cols}", _TOTAL_NNZ_OFFSET
        )

    rows: List[SparseRow] = []
    seen = 0
    for m in range(n_rows):
        row_offset = reader.offset
        (nnz,) = _U64.unpack(reader.read(_U64.size, f"row {m} count"))
        if nnz > n_cols:
            raise FileFormatError(f"row {m} declares {nnz} entries for {n_cols} columns", row_offset)
        if seen + nnz > total_nnz:
            raise FileFormatError(f"row {m} exceeds the declared total of {total_nnz} entries", row_offset)
        records_offset = reader.offset
        records = np.frombuffer(reader.read(nnz * RECORD_DTYPE.itemsize, f"row {m} records"), dtype=RECORD_DTYPE)
        indices = records["index"]
        lengths = records["length"]
        if nnz:
            out_of_range = np.flatnonzero(indices >= n_cols)
            if out_of_range.size:
                bad = int(out_of_range[0])
                raise FileFormatError(
                    f"row {m} index {int(indices[bad])} >= n_cols {n_cols}",
                    records_offset + bad * RECORD_DTYPE.itemsize,
                )
            unordered = np.flatnonzero(np.diff(indices.astype(np.int64)) <= 0)
            if unordered.size:
                bad = int(unordered[0]) + 1
                raise FileFormatError(
                    f"row {m} indices not strictly increasing",
                    records_offset + bad * RECORD_DTYPE.itemsize,
                )
            invalid = np.flatnonzero(~np.isfinite(lengths) | (lengths <= 0.0))
            if invalid.size:
                bad = int(invalid[0])
                raise FileFormatError(
                    f"row {m} length must be finite and positive",
                    records_offset + bad * RECORD_DTYPE.itemsize + 8,
                )
        rows.append(SparseRow(indices.astype(np.int64), lengths.astype(np.float64)))
        seen += nnz

    if seen != total_nnz:
        raise FileFormatError(f"rows hold {seen} entries but the header declares {total_nnz}", reader.offset)
    reader.expect_end()
    return ProjectionMatrix(tuple(rows), int(n_cols))


def _dump_dense(handle: BinaryIO, shape: Tuple[int, ...], values: np.ndarray) -> int:
    written = handle.write(_DENSE_PREFIX.pack(DENSE_MAGIC, FORMAT_VERSION, len(shape)))
    written += handle.write(struct.pack(f"<{len(shape)}Q", *shape))
    written += handle.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    return written


def _load_dense(handle: BinaryIO) -> Tuple[Tuple[int, ...], np.ndarray]:
    reader = _Reader(handle)
    magic, version, dim = _DENSE_PREFIX.unpack(reader.read(_DENSE_PREFIX.size, "header"))
    _check_magic(DENSE_MAGIC, magic, version)
    if dim not in (1, 2, 3):
        raise FileFormatError(f"dimension {dim} not in 1..3", 12)
    shape = struct.unpack(f"<{dim}Q", reader.read(8 * dim, "shape"))
    count = math.prod(shape)
    payload = np.frombuffer(reader.read(8 * count, "payload"), dtype="<f8").astype(np.float64)
    reader.expect_end()
    return tuple(int(n) for n in shape), payload


def dump_image(handle: BinaryIO, image: Image) -> int:
    return _dump_dense(handle, image.grid.shape, image.values)


def load_image(handle: BinaryIO, grid: Optional[ImageGrid] = None) -> Image:
    """
    Read an image; with ``grid`` the stored shape must match it, otherwise a
    unit-scale centered grid is built from the shape.
    """
    shape, values = _load_dense(handle)
    if len(shape) == 1:
        raise ValidationError("file holds a sinogram, not an image", field="dim")
    if grid is None:
        if len(shape) == 2:
            grid = ImageGrid(ny=shape[0], nx=shape[1])
        else:
            grid = ImageGrid(nz=shape[0], ny=shape[1], nx=shape[2])
    elif shape != grid.shape:
        raise ValidationError(f"image shape {shape} does not match grid shape {grid.shape}", field="shape")
    return Image(grid, values)


def dump_sinogram(handle: BinaryIO, sino: Sinogram) -> int:
    return _dump_dense(handle, (sino.ray_count,), sino.values)


def load_sinogram(handle: BinaryIO, ray_count: Optional[int] = None) -> Sinogram:
    shape, values = _load_dense(handle)
    if len(shape) != 1:
        raise ValidationError(f"file holds a {len(shape)}D image, not a sinogram", field="dim")
    if ray_count is not None and shape[0] != ray_count:
        raise ValidationError(f"sinogram has {shape[0]} values for {ray_count} rays", field="shape")
    return Sinogram(values)


def _open(path: PathLike, mode: str) -> BinaryIO:
    try:
        return open(path, mode)
    except OSError as exc:
        logger.error("Cannot open file", extra={"path": str(path), "mode": mode, "error": str(exc)})
        raise StorageError(exc.strerror or str(exc), path=str(path)) from exc


def write_matrix(path: PathLike, matrix: ProjectionMatrix) -> int:
    with _open(path, "wb") as handle:
        written = dump_matrix(handle, matrix)
    logger.info("Matrix written", extra={"path": str(path), "bytes": written, "n_rows": matrix.n_rows})
    return written


def read_matrix(path: PathLike) -> ProjectionMatrix:
    with _open(path, "rb") as handle:
        return load_matrix(handle)


def write_image(path: PathLike, image: Image) -> int:
    with _open(path, "wb") as handle:
        return dump_image(handle, image)


def read_image(path: PathLike, grid: Optional[ImageGrid] = None) -> Image:
    with _open(path, "rb") as handle:
        return load_image(handle, grid)


def write_sinogram(path: PathLike, sino: Sinogram) -> int:
    with _open(path, "wb") as handle:
        return dump_sinogram(handle, sino)


def read_sinogram(path: PathLike, ray_count: Optional[int] = None) -> Sinogram:
    with _open(path, "rb") as handle:
        return load_sinogram(handle, ray_count)
