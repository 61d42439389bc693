"""
Unit tests for the binary matrix and dense-vector formats.
"""
import io
import struct

import numpy as np
import pytest

from xrt.cli.main import main
from xrt.core.exceptions import EXIT_IO, FileFormatError, StorageError, ValidationError, map_exception_to_exit_code
from xrt.io.binary import (
    MATRIX_MAGIC,
    dump_image,
    dump_matrix,
    dump_sinogram,
    load_image,
    load_matrix,
    load_sinogram,
    read_image,
    read_matrix,
    read_sinogram,
    write_image,
    write_matrix,
    write_sinogram,
)
from xrt.schemas.grid import ImageGrid
from xrt.schemas.rows import SparseRow
from xrt.services.projector import Image, ProjectionMatrix, RaySet, Sinogram, assemble_matrix



@pytest.fixture
def diagonal_matrix(grid_3x3, diagonal_beam) -> ProjectionMatrix:
    return assemble_matrix(RaySet(grid_3x3, (diagonal_beam,)))


def _dumped(matrix: ProjectionMatrix) -> bytes:
    buffer = io.BytesIO()
    dump_matrix(buffer, matrix)
    return buffer.getvalue()


class TestMatrixFormat:
    def test_single_row_layout(self, diagonal_matrix):
        data = _dumped(diagonal_matrix)

        assert len(data) == 36 + 8 + 3 * 16
        assert data[:8] == MATRIX_MAGIC
        assert struct.unpack("<IQQQ", data[8:36]) == (1, 1, 9, 3)
        assert load_matrix(io.BytesIO(data)) == diagonal_matrix

    def test_empty_matrix(self):
        matrix = ProjectionMatrix((), n_cols=16)
        data = _dumped(matrix)

        assert len(data) == 36
        assert load_matrix(io.BytesIO(data)) == matrix

    def test_rows_without_records(self):
        matrix = ProjectionMatrix((SparseRow.empty(), SparseRow([2], [0.5]), SparseRow.empty()), n_cols=4)

        assert load_matrix(io.BytesIO(_dumped(matrix))) == matrix

    def test_file_roundtrip(self, tmp_path, diagonal_matrix):
        path = tmp_path / "a.mat"

        written = write_matrix(path, diagonal_matrix)

        assert path.stat().st_size == written
        assert read_matrix(path) == diagonal_matrix


@pytest.mark.error_handling
class TestMatrixErrors:
    def test_bad_magic(self, diagonal_matrix):
        data = b"NOTAMATX" + _dumped(diagonal_matrix)[8:]

        with pytest.raises(FileFormatError) as info:
            load_matrix(io.BytesIO(data))
        assert info.value.offset == 0

    def test_bad_version(self, diagonal_matrix):
        data = bytearray(_dumped(diagonal_matrix))
        data[8:12] = struct.pack("<I", 9)

        with pytest.raises(FileFormatError) as info:
            load_matrix(io.BytesIO(bytes(data)))
        assert info.value.offset == 8

    def test_truncated_records(self, diagonal_matrix):
        data = _dumped(diagonal_matrix)[:-5]

        with pytest.raises(FileFormatError, match="truncated"):
            load_matrix(io.BytesIO(data))

    def test_index_out_of_range(self, diagonal_matrix):
        data = bytearray(_dumped(diagonal_matrix))
        # second record's index field
        data[44 + 16 : 44 + 24] = struct.pack("<Q", 9)

        with pytest.raises(FileFormatError) as info:
            load_matrix(io.BytesIO(bytes(data)))
        assert info.value.offset == 44 + 16

    def test_unordered_indices(self):
        data = bytearray(_dumped(ProjectionMatrix((SparseRow([1, 3], [1.0, 1.0]),), n_cols=4)))
        data[44 + 16 : 44 + 24] = struct.pack("<Q", 0)

        with pytest.raises(FileFormatError, match="strictly increasing"):
            load_matrix(io.BytesIO(bytes(data)))

    def test_declared_total_mismatch(self, diagonal_matrix):
        data = bytearray(_dumped(diagonal_matrix))
        data[28:36] = struct.pack("<Q", 5)

        with pytest.raises(FileFormatError, match="declares"):
            load_matrix(io.BytesIO(bytes(data)))

    def test_trailing_bytes(self, diagonal_matrix):
        with pytest.raises(FileFormatError, match="trailing"):
            load_matrix(io.BytesIO(_dumped(diagonal_matrix) + b"\x00"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError) as info:
            read_matrix(tmp_path / "missing.mat")
        assert info.value.path.endswith("missing.mat")


class TestDenseFormats:
    def test_image_roundtrip(self, tmp_path, grid_3x3x3):
        image = Image(grid_3x3x3, np.arange(27.0))
        path = tmp_path / "image.bin"

        write_image(path, image)

        loaded = read_image(path, grid_3x3x3)
        assert loaded.grid == grid_3x3x3
        assert loaded.values.tolist() == image.values.tolist()

    def test_image_without_grid_infers_shape(self):
        buffer = io.BytesIO()
        dump_image(buffer, Image(ImageGrid(nx=4, ny=2), np.ones(8)))
        buffer.seek(0)

        image = load_image(buffer)

        assert image.grid == ImageGrid(nx=4, ny=2)

    def test_image_shape_mismatch(self, grid_3x3, grid_4x4):
        buffer = io.BytesIO()
        dump_image(buffer, Image.zeros(grid_3x3))
        buffer.seek(0)

        with pytest.raises(ValidationError):
            load_image(buffer, grid_4x4)

    def test_sinogram_roundtrip(self, tmp_path):
        sino = Sinogram(np.array([2.25, -1.0, 0.0]))
        path = tmp_path / "sino.bin"

        write_sinogram(path, sino)

        assert read_sinogram(path, ray_count=3).values.tolist() == [2.25, -1.0, 0.0]

    def test_sinogram_count_mismatch(self):
        buffer = io.BytesIO()
        dump_sinogram(buffer, Sinogram(np.zeros(2)))
        buffer.seek(0)

        with pytest.raises(ValidationError):
            load_sinogram(buffer, ray_count=3)

    def test_kind_mismatch(self, grid_3x3):
        image_buffer = io.BytesIO()
        dump_image(image_buffer, Image.zeros(grid_3x3))
        image_buffer.seek(0)
        sino_buffer = io.BytesIO()
        dump_sinogram(sino_buffer, Sinogram(np.zeros(9)))
        sino_buffer.seek(0)

        with pytest.raises(ValidationError):
            load_sinogram(image_buffer)
        with pytest.raises(ValidationError):
            load_image(sino_buffer)

    def test_truncated_payload(self):
        buffer = io.BytesIO()
        dump_sinogram(buffer, Sinogram(np.zeros(4)))

        with pytest.raises(FileFormatError):
            load_sinogram(io.BytesIO(buffer.getvalue()[:-8]))

@pytest.mark.error_handling
class TestCorruptedCounts:
    """Declared sizes are checked against the column count and the bytes present."""

    @staticmethod
    def _header(n_rows: int, n_cols: int, total: int) -> bytes:
        return MATRIX_MAGIC + struct.pack("<IQQQ", 1, n_rows, n_cols, total)

    def test_row_count_above_columns(self):
        data = self._header(1, 9, 3) + struct.pack("<Q", 2**62)

        with pytest.raises(FileFormatError) as info:
            load_matrix(io.BytesIO(data))
        assert info.value.offset == 36
        assert map_exception_to_exit_code(info.value) == EXIT_IO

    def test_row_count_beyond_file_size(self, tmp_path):
        path = tmp_path / "huge_row.mat"
        path.write_bytes(self._header(1, 2**40, 2**36) + struct.pack("<Q", 2**36))

        with pytest.raises(FileFormatError, match="truncated row 0 records") as info:
            read_matrix(path)
        assert info.value.offset == 44

    def test_total_above_matrix_size(self):
        data = self._header(2, 3, 7)

        with pytest.raises(FileFormatError) as info:
            load_matrix(io.BytesIO(data))
        assert info.value.offset == 28

    def test_dense_shape_beyond_file_size(self):
        data = b"XRTDENSE" + struct.pack("<II", 1, 1) + struct.pack("<Q", 2**61)

        with pytest.raises(FileFormatError, match="truncated payload") as info:
            load_sinogram(io.BytesIO(data))
        assert info.value.offset == 24

    def test_cli_reports_corrupted_image_as_io(self, tmp_path, write_text, diagonal_config_text, cli_streams):
        image = tmp_path / "bad.img"
        image.write_bytes(b"XRTDENSE" + struct.pack("<II", 1, 2) + struct.pack("<QQ", 2**40, 2**40))
        config = write_text("diag.cfg", diagonal_config_text)
        stdout, stderr = cli_streams

        code = main(["project", "--config", str(config), "--image", str(image), "--out", str(tmp_path / "s")], stdout, stderr)

        assert code == EXIT_IO
        assert "FILE_FORMAT_ERROR" in stderr.getvalue()


@pytest.mark.property
class TestByteIdenticalRewrite:
    """Reading a file and writing it back reproduces the same bytes."""

    CASES = 1000

    def test_matrices(self, rng):
        for _ in range(self.CASES):
            n_cols = int(rng.integers(1, 40))
            rows = []
            for _ in range(int(rng.integers(0, 6))):
                nnz = int(rng.integers(0, n_cols + 1))
                indices = np.sort(rng.choice(n_cols, size=nnz, replace=False))
                rows.append(SparseRow(indices, rng.uniform(1e-9, 2.0, size=nnz)))
            data = _dumped(ProjectionMatrix(tuple(rows), n_cols))

            assert _dumped(load_matrix(io.BytesIO(data))) == data

    def test_images_and_sinograms(self, rng):
        for _ in range(self.CASES):
            nz = None if rng.random() < 0.5 else int(rng.integers(1, 5))
            grid = ImageGrid(nx=int(rng.integers(1, 6)), ny=int(rng.integers(1, 6)), nz=nz)
            image_buffer = io.BytesIO()
            dump_image(image_buffer, Image(grid, rng.normal(size=grid.size)))
            sino_buffer = io.BytesIO()
            dump_sinogram(sino_buffer, Sinogram(rng.normal(size=int(rng.integers(0, 20)))))

            rewritten_image = io.BytesIO()
            dump_image(rewritten_image, load_image(io.BytesIO(image_buffer.getvalue()), grid))
            rewritten_sino = io.BytesIO()
            dump_sinogram(rewritten_sino, load_sinogram(io.BytesIO(sino_buffer.getvalue())))

            assert rewritten_image.getvalue() == image_buffer.getvalue()
            assert rewritten_sino.getvalue() == sino_buffer.getvalue()
