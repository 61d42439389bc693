"""
Unit tests for the library exception classes and exit-code mapping.
"""
import pydantic
import pytest

from xrt.core.exceptions import (
    EXIT_IO,
    EXIT_SELFTEST,
    EXIT_VALIDATION,
    BoundsError,
    ConfigParseError,
    FileFormatError,
    SelftestFailure,
    StorageError,
    ValidationError,
    XRayTransformError,
    create_error_payload,
    from_pydantic,
    map_exception_to_exit_code,
)
from xrt.schemas.grid import ImageGrid


class TestXRayTransformError:
    """Test the base exception class."""

    def test_base_exception_creation(self):
        """Test basic exception creation."""
        exception = XRayTransformError(message="Test error", error_code="TEST_ERROR")

        assert exception.message == "Test error"
        assert exception.error_code == "TEST_ERROR"
        assert exception.details == {}
        assert str(exception) == "Test error"

    def test_base_exception_default_error_code(self):
        exception = XRayTransformError("Test message")

        assert exception.error_code == "GENERIC_ERROR"
        assert isinstance(exception, Exception)


class TestSubclasses:
    """Test the specific exception types and their extra attributes."""

    def test_validation_error_with_field(self):
        error = ValidationError("bad D", field="D")

        assert error.field == "D"
        assert error.error_code == "VALIDATION_ERROR"

    def test_bounds_error_is_validation_error(self):
        error = BoundsError("index outside grid", field="idx")

        assert isinstance(error, ValidationError)
        assert error.error_code == "BOUNDS_ERROR"

    def test_config_parse_error_names_line(self):
        error = ConfigParseError("unknown geometry tag 'pencil'", line_number=4)

        assert error.line_number == 4
        assert error.message.startswith("line 4:")
        assert isinstance(error, ValidationError)

    def test_file_format_error_names_offset(self):
        error = FileFormatError("bad magic", offset=0)

        assert error.offset == 0
        assert "offset 0" in error.message

    def test_storage_error_names_path(self):
        error = StorageError("No such file or directory", path="/missing/matrix.bin")

        assert error.path == "/missing/matrix.bin"
        assert error.message.endswith("/missing/matrix.bin")

    def test_selftest_failure_names_suite(self):
        error = SelftestFailure("table 3", "index 13 differs")

        assert error.suite == "table 3"
        assert error.message == "table 3: index 13 differs"


class TestFromPydantic:
    """Test conversion of pydantic validation errors."""

    def test_conversion_keeps_location_and_context(self):
        with pytest.raises(pydantic.ValidationError) as info:
            ImageGrid(nx=0, ny=3)

        error = from_pydantic(info.value, "grid")

        assert isinstance(error, ValidationError)
        assert error.field == "nx"
        assert error.message.startswith("grid: nx:")
        assert error.details["errors"]


class TestExitCodeMapping:
    """Test the exception to exit-code mapping."""

    @pytest.mark.parametrize(
        "exception, expected",
        [
            (ValidationError("x"), EXIT_VALIDATION),
            (BoundsError("x"), EXIT_VALIDATION),
            (ConfigParseError("x", 1), EXIT_VALIDATION),
            (FileFormatError("x", 8), EXIT_IO),
            (StorageError("x", "p"), EXIT_IO),
            (SelftestFailure("table 1", "x"), EXIT_SELFTEST),
            (FileNotFoundError("x"), EXIT_IO),
            (RuntimeError("x"), EXIT_VALIDATION),
        ],
    )
    def test_exit_codes(self, exception, expected):
        assert map_exception_to_exit_code(exception) == expected


@pytest.mark.error_handling
class TestErrorPayload:
    """Test structured error reports."""

    def test_payload_basic_fields(self):
        payload = create_error_payload(ValidationError("bad", field="D"), run_id="abc")

        assert payload["error_code"] == "VALIDATION_ERROR"
        assert payload["message"] == "bad"
        assert payload["exit_code"] == EXIT_VALIDATION
        assert payload["run_id"] == "abc"
        assert payload["field"] == "D"

    def test_payload_specific_fields(self):
        assert create_error_payload(ConfigParseError("x", 7))["line_number"] == 7
        assert create_error_payload(FileFormatError("x", 36))["offset"] == 36
        assert create_error_payload(StorageError("x", "/tmp/a"))["path"] == "/tmp/a"
        assert create_error_payload(SelftestFailure("table 2", "x"))["suite"] == "table 2"

    def test_payload_without_run_id(self):
        assert "run_id" not in create_error_payload(XRayTransformError("x"))
