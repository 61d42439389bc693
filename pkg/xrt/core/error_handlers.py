"""
Centralized exception handling for the command-line front end.

Every failure reaching the top of a CLI invocation is logged once, reported on
stderr in a consistent shape and converted to an exit code.
"""
import json
import sys
from typing import Optional, TextIO

from xrt.core.exceptions import (
    EXIT_IO,
    EXIT_VALIDATION,
    StorageError,
    XRayTransformError,
    create_error_payload,
    map_exception_to_exit_code,
)
from xrt.core.logging import get_logger, get_run_id

logger = get_logger("error_handlers")


def format_error(payload: dict, as_json: bool = False) -> str:
    """Render an error payload as one stderr line."""
    if as_json:
        return json.dumps(payload, default=str, sort_keys=True)
    return f"error [{payload['error_code']}]: {payload['message']}"


def handle_library_exception(exc: XRayTransformError, stream: Optional[TextIO] = None, as_json: bool = False) -> int:
    """Handle a library exception and return the exit code."""
    payload = create_error_payload(exc, run_id=get_run_id())
    logger.info(
        f"Command failed: {exc.__class__.__name__}",
        extra={
            "error_code": exc.error_code,
            "error_message": exc.message,
            "details": exc.details,
        },
    )
    print(format_error(payload, as_json), file=stream or sys.stderr)
    return payload["exit_code"]


def handle_os_error(exc: OSError, stream: Optional[TextIO] = None, as_json: bool = False) -> int:
    """Handle a file-system failure that escaped the io layer."""
    wrapped = StorageError(exc.strerror or str(exc), path=str(exc.filename or "<unknown>"))
    handle_library_exception(wrapped, stream, as_json)
    return EXIT_IO


def handle_unexpected_exception(exc: Exception, stream: Optional[TextIO] = None) -> int:
    """Handle anything not raised on purpose by the library."""
    logger.error(
        "Unexpected exception occurred",
        extra={"error_type": exc.__class__.__name__, "error_message": str(exc)},
        exc_info=True,
    )
    print(f"error [INTERNAL_ERROR]: {exc.__class__.__name__}: {exc}", file=stream or sys.stderr)
    return EXIT_VALIDATION


def handle_exception(exc: BaseException, stream: Optional[TextIO] = None, as_json: bool = False) -> int:
    """Dispatch to the matching handler and return the exit code."""
    if isinstance(exc, XRayTransformError):
        return handle_library_exception(exc, stream, as_json)
    if isinstance(exc, OSError):
        return handle_os_error(exc, stream, as_json)
    if isinstance(exc, Exception):
        return handle_unexpected_exception(exc, stream)
    return map_exception_to_exit_code(exc)
