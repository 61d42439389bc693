"""
Custom exception classes for the X-ray transform library.

Every error raised on purpose by the library derives from
``XRayTransformError`` so callers (and the CLI) can handle them in one place
and map them onto exit codes.
"""
from typing import Any, Dict, Optional

import pydantic


EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_SELFTEST = 3


class XRayTransformError(Exception):
    """Base exception class for the library."""

    def __init__(
        self,
        message: str,
        error_code: str = "GENERIC_ERROR",
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(XRayTransformError):
    """Raised when parameters, grids or shapes fail validation."""

    def __init__(self, message: str, field: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="VALIDATION_ERROR", details=details)
        self.field = field


class BoundsError(ValidationError):
    """Raised when a unit index lies outside its grid."""

    def __init__(self, message: str, field: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, field=field, details=details)
        self.error_code = "BOUNDS_ERROR"


class ConfigParseError(ValidationError):
    """Raised for a malformed line in a ray-set configuration."""

    def __init__(self, message: str, line_number: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=f"line {line_number}: {message}", details=details)
        self.error_code = "CONFIG_PARSE_ERROR"
        self.line_number = line_number


class FileFormatError(XRayTransformError):
    """Raised when a binary file violates its layout."""

    def __init__(self, message: str, offset: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"{message} (at byte offset {offset})",
            error_code="FILE_FORMAT_ERROR",
            details=details,
        )
        self.offset = offset


class StorageError(XRayTransformError):
    """Raised when reading or writing a file fails at the OS level."""

    def __init__(self, message: str, path: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=f"{message}: {path}", error_code="STORAGE_ERROR", details=details)
        self.path = path


class SelftestFailure(XRayTransformError):
    """Raised when a golden suite or the oracle sweep disagrees."""

    def __init__(self, suite: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"{suite}: {message}",
            error_code="SELFTEST_FAILURE",
            details=details,
        )
        self.suite = suite


def from_pydantic(exc: pydantic.ValidationError, context: str) -> ValidationError:
    """Convert a pydantic validation error into the project's ValidationError."""
    first = exc.errors()[0] if exc.errors() else {}
    location = ".".join(str(part) for part in first.get("loc", ()))
    reason = first.get("msg", str(exc))
    message = f"{context}: {location}: {reason}" if location else f"{context}: {reason}"
    return ValidationError(
        message,
        field=location or None,
        details={"errors": [err.get("msg") for err in exc.errors()]},
    )


def map_exception_to_exit_code(exception: BaseException) -> int:
    """Map exceptions to CLI exit codes."""
    exit_code_map = {
        SelftestFailure: EXIT_SELFTEST,
        FileFormatError: EXIT_IO,
        StorageError: EXIT_IO,
        ValidationError: EXIT_VALIDATION,
    }
    for exception_type, code in exit_code_map.items():
        if isinstance(exception, exception_type):
            return code
    if isinstance(exception, OSError):
        return EXIT_IO
    return EXIT_VALIDATION


def create_error_payload(exception: XRayTransformError, run_id: Optional[str] = None) -> Dict[str, Any]:
    """Build a structured error report for a library exception."""
    payload: Dict[str, Any] = {
        "error_code": exception.error_code,
        "message": exception.message,
        "details": exception.details,
        "exit_code": map_exception_to_exit_code(exception),
    }

    if run_id:
        payload["run_id"] = run_id

    # Add specific fields for certain exception types
    if isinstance(exception, ConfigParseError):
        payload["line_number"] = exception.line_number
    elif isinstance(exception, ValidationError) and exception.field:
        payload["field"] = exception.field
    elif isinstance(exception, FileFormatError):
        payload["offset"] = exception.offset
    elif isinstance(exception, StorageError):
        payload["path"] = exception.path
    elif isinstance(exception, SelftestFailure):
        payload["suite"] = exception.suite

    return payload
