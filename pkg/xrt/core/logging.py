"""
Logging configuration for the X-ray transform library.

Provides:
- Structured JSON records carrying a per-run correlation id
- Console output on stderr (stdout belongs to command output)
- Optional rotating file handlers
- A performance decorator and a logging context manager
"""
import json
import logging
import logging.config
import platform
import sys
import time
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Callable, Dict, Optional

import psutil

from xrt.core.config import Settings, get_settings

# Context variable for run correlation
run_id_context: ContextVar[Optional[str]] = ContextVar("run_id", default=None)

_RESERVED_ATTRS = {
    "name", "msg", "args", "levelname", "levelno", "pathname", "filename",
    "module", "lineno", "funcName", "created", "msecs", "relativeCreated",
    "thread", "threadName", "processName", "process", "getMessage",
    "exc_info", "exc_text", "stack_info", "taskName", "message",
}


class JSONFormatter(logging.Formatter):
    """
    JSON formatter with service information, source location and
    correlation id. ERROR records also carry process metrics.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        current = get_settings()
        self.hostname = platform.node()
        self.service_name = current.PROJECT_NAME
        self.service_version = current.PROJECT_VERSION

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_entry: Dict[str, Any] = {
            "@timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "service": {
                "name": self.service_name,
                "version": self.service_version,
                "hostname": self.hostname,
            },
            "source": {
                "module": record.module,
                "function": record.funcName,
                "line": record.lineno,
            },
            "process": {
                "id": record.process,
                "thread_name": record.threadName,
            },
        }

        if run_id := run_id_context.get():
            log_entry["correlation"] = {"run_id": run_id}

        if record.levelno >= logging.ERROR:
            try:
                process = psutil.Process()
                log_entry["system"] = {
                    "cpu_percent": process.cpu_percent(),
                    "memory_mb": round(process.memory_info().rss / 1024 / 1024, 2),
                }
            except (psutil.Error, OSError):
                pass

        extra_fields = {
            key: value for key, value in record.__dict__.items() if key not in _RESERVED_ATTRS
        }
        if extra_fields:
            log_entry["extra"] = extra_fields

        if record.exc_info:
            log_entry["exception"] = {
                "type": record.exc_info[0].__name__ if record.exc_info[0] else None,
                "message": str(record.exc_info[1]) if record.exc_info[1] else None,
                "traceback": self.formatException(record.exc_info),
            }

        return json.dumps(log_entry, default=str, ensure_ascii=False)


def build_logging_config(current: Settings) -> Dict[str, Any]:
    """Build the dictConfig for the given settings."""
    log_level = current.effective_log_level
    console_format = "simple" if current.DEBUG or current.LOG_FORMAT == "simple" else "json"

    handlers: Dict[str, Dict[str, Any]] = {
        "console": {
            "level": log_level,
            "class": "logging.StreamHandler",
            "formatter": console_format,
            "stream": sys.stderr,
        },
    }
    if current.LOG_DIR is not None:
        current.LOG_DIR.mkdir(parents=True, exist_ok=True)
        handlers["file"] = {
            "level": "INFO",
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "json",
            "filename": str(current.LOG_DIR / "xrt.log"),
            "maxBytes": current.LOG_MAX_BYTES,
            "backupCount": current.LOG_BACKUP_COUNT,
            "encoding": "utf-8",
        }
        handlers["error_file"] = {
            "level": "ERROR",
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "json",
            "filename": str(current.LOG_DIR / "xrt_errors.log"),
            "maxBytes": current.LOG_MAX_BYTES,
            "backupCount": current.LOG_BACKUP_COUNT,
            "encoding": "utf-8",
        }

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "json": {"()": JSONFormatter},
            "simple": {"format": "%(levelname)s - %(name)s - %(message)s"},
        },
        "handlers": handlers,
        "loggers": {
            "xrt": {
                "level": log_level,
                "handlers": list(handlers),
                "propagate": False,
            },
        },
    }


def setup_logging(current: Optional[Settings] = None) -> None:
    """Apply the logging configuration for the current settings."""
    current = current or get_settings()
    config = build_logging_config(current)
    logging.config.dictConfig(config)

    logging.getLogger("xrt.startup").debug(
        "Logging system initialized",
        extra={
            "log_level": current.effective_log_level,
            "handlers": list(config["handlers"]),
            "log_directory": str(current.LOG_DIR) if current.LOG_DIR else None,
        },
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger under the ``xrt`` namespace."""
    return logging.getLogger(f"xrt.{name}")


def set_run_id(run_id: Optional[str] = None) -> str:
    """Set the correlation id for the current run, generating one if needed."""
    if run_id is None:
        run_id = uuid.uuid4().hex[:12]
    run_id_context.set(run_id)
    return run_id


def get_run_id() -> Optional[str]:
    return run_id_context.get()


def log_performance_metric(metric_name: str, value: float, unit: str = "ms", **kwargs) -> None:
    """Log a performance metric on the ``xrt.performance`` logger."""
    logging.getLogger("xrt.performance").info(
        f"Performance metric: {metric_name}",
        extra={
            "metric_name": metric_name,
            "metric_value": value,
            "metric_unit": unit,
            **kwargs,
        },
    )


def log_performance(operation: str, logger: Optional[logging.Logger] = None, threshold_ms: float = 1000.0):
    """
    Decorator logging the duration of an operation.

    Args:
        operation: Name of the operation being logged
        logger: Logger instance to use (derived from the module if None)
        threshold_ms: Log as warning if execution time exceeds this threshold
    """
    def decorator(func: Callable) -> Callable:
        op_logger = logger or logging.getLogger(func.__module__)

        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                execution_time = (time.perf_counter() - start_time) * 1000
                op_logger.error(
                    f"Operation failed: {operation}",
                    extra={
                        "operation": operation,
                        "execution_time_ms": round(execution_time, 2),
                        "status": "error",
                        "error": str(e),
                        "error_type": e.__class__.__name__,
                    },
                )
                raise

            execution_time = (time.perf_counter() - start_time) * 1000
            log_method = op_logger.warning if execution_time > threshold_ms else op_logger.info
            message = f"Slow operation: {operation}" if execution_time > threshold_ms else f"Operation completed: {operation}"
            log_method(
                message,
                extra={
                    "operation": operation,
                    "execution_time_ms": round(execution_time, 2),
                    "status": "success",
                },
            )
            log_performance_metric(f"{operation}_duration", execution_time, "ms", status="success")
            return result

        return wrapper

    return decorator


class LoggingContext:
    """Context manager bracketing an operation with start/complete records."""

    def __init__(self, operation: str, logger: Optional[logging.Logger] = None, **context):
        self.operation = operation
        self.logger = logger or get_logger("context")
        self.context = context
        self.start_time = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.debug(
            f"Starting operation: {self.operation}",
            extra={"operation": self.operation, "phase": "start", **self.context},
        )
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        execution_time = (time.perf_counter() - self.start_time) * 1000

        if exc_type is None:
            self.logger.info(
                f"Completed operation: {self.operation}",
                extra={
                    "operation": self.operation,
                    "phase": "complete",
                    "execution_time_ms": round(execution_time, 2),
                    "status": "success",
                    **self.context,
                },
            )
        else:
            self.logger.error(
                f"Failed operation: {self.operation}",
                extra={
                    "operation": self.operation,
                    "phase": "error",
                    "execution_time_ms": round(execution_time, 2),
                    "status": "error",
                    "error_type": exc_type.__name__,
                    "error_message": str(exc_val),
                    **self.context,
                },
            )
        return False
