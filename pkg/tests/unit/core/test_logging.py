"""
Unit tests for the structured logging setup.
"""
import json
import logging
from unittest.mock import Mock, patch

import pytest

from xrt.core.config import Settings
from xrt.core.logging import (
    JSONFormatter,
    LoggingContext,
    build_logging_config,
    get_logger,
    get_run_id,
    log_performance,
    set_run_id,
)


def _record(level=logging.INFO, msg="Row computed", **extra) -> logging.LogRecord:
    record = logging.LogRecord("xrt.test", level, __file__, 10, msg, None, None, func="test_func")
    for key, value in extra.items():
        setattr(record, key, value)
    return record


@pytest.mark.logging
class TestJSONFormatter:
    """Test the JSON formatter."""

    def test_basic_fields(self, run_id):
        entry = json.loads(JSONFormatter().format(_record()))

        assert entry["level"] == "INFO"
        assert entry["logger"] == "xrt.test"
        assert entry["message"] == "Row computed"
        assert entry["service"]["name"] == "xray-transform"
        assert entry["source"]["function"] == "test_func"
        assert entry["correlation"]["run_id"] == run_id

    def test_extra_fields(self):
        entry = json.loads(JSONFormatter().format(_record(nnz=3, geometry="parallel2d")))

        assert entry["extra"] == {"nnz": 3, "geometry": "parallel2d"}

    def test_error_records_carry_process_metrics(self):
        with patch("xrt.core.logging.psutil.Process") as process_class:
            process = Mock()
            process.cpu_percent.return_value = 12.5
            process.memory_info.return_value = Mock(rss=256 * 1024 * 1024)
            process_class.return_value = process

            entry = json.loads(JSONFormatter().format(_record(level=logging.ERROR)))

        assert entry["system"] == {"cpu_percent": 12.5, "memory_mb": 256.0}

    def test_exception_info(self):
        try:
            raise ValueError("bad value")
        except ValueError:
            import sys

            record = _record(level=logging.ERROR)
            record.exc_info = sys.exc_info()
        entry = json.loads(JSONFormatter().format(record))

        assert entry["exception"]["type"] == "ValueError"
        assert "bad value" in entry["exception"]["traceback"]


@pytest.mark.logging
class TestLoggingSetup:
    """Test dictConfig construction."""

    def test_console_only_by_default(self):
        config = build_logging_config(Settings(LOG_LEVEL="INFO", LOG_FORMAT="json"))

        assert list(config["handlers"]) == ["console"]
        assert config["handlers"]["console"]["formatter"] == "json"
        assert config["loggers"]["xrt"]["level"] == "INFO"

    def test_debug_forces_simple_console(self):
        config = build_logging_config(Settings(DEBUG=True, LOG_FORMAT="json"))

        assert config["handlers"]["console"]["formatter"] == "simple"
        assert config["loggers"]["xrt"]["level"] == "DEBUG"

    def test_log_dir_adds_rotating_files(self, tmp_path):
        config = build_logging_config(Settings(LOG_DIR=tmp_path / "logs", LOG_MAX_BYTES=1024))

        assert {"console", "file", "error_file"} == set(config["handlers"])
        assert config["handlers"]["file"]["maxBytes"] == 1024
        assert config["handlers"]["error_file"]["level"] == "ERROR"
        assert (tmp_path / "logs").is_dir()

    def test_logger_namespace(self):
        assert get_logger("projector").name == "xrt.projector"

    def test_run_id_roundtrip(self):
        assert set_run_id("abc123") == "abc123"
        assert get_run_id() == "abc123"
        generated = set_run_id()
        assert len(generated) == 12 and get_run_id() == generated


@pytest.mark.logging
class TestLogPerformanceDecorator:
    """Test the performance decorator."""

    def test_success_logged_as_info(self):
        logger = Mock()

        @log_performance("unit_op", logger=logger, threshold_ms=10_000)
        def operation(x):
            return x * 2

        assert operation(21) == 42
        logger.info.assert_called_once()
        assert logger.info.call_args.kwargs["extra"]["status"] == "success"

    def test_slow_operation_logged_as_warning(self):
        logger = Mock()

        @log_performance("slow_op", logger=logger, threshold_ms=-1.0)
        def operation():
            return None

        operation()
        logger.warning.assert_called_once()

    def test_failure_logged_and_reraised(self):
        logger = Mock()

        @log_performance("failing_op", logger=logger)
        def operation():
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            operation()
        assert logger.error.call_args.kwargs["extra"]["error_type"] == "RuntimeError"


@pytest.mark.logging
class TestLoggingContext:
    """Test the logging context manager."""

    def test_success(self):
        logger = Mock()
        with LoggingContext("assemble_matrix", logger, ray_count=4):
            pass

        logger.debug.assert_called_once()
        extra = logger.info.call_args.kwargs["extra"]
        assert extra["phase"] == "complete"
        assert extra["ray_count"] == 4

    def test_failure_does_not_swallow(self):
        logger = Mock()
        with pytest.raises(ValueError):
            with LoggingContext("selftest", logger):
                raise ValueError("bad")

        assert logger.error.call_args.kwargs["extra"]["error_type"] == "ValueError"
