"""Logging configuration for osotoc."""

import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Optional, Union, cast

from osotoc.types import JsonDict

LOGGER_NAME = "osotoc"
PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class StructuredLogger(logging.Logger):
    """Logger that attaches structured fields to its records."""

    def _log_fields(self, level: int, msg: str, fields: JsonDict) -> None:
        if not self.isEnabledFor(level):
            return
        if fields:
            msg = f"{msg} {fields}"
        self.log(level, msg, extra={"extra_fields": fields}, stacklevel=3)

    def debug_with_fields(self, msg: str, **fields: Any) -> None:
        """Log a debug message with structured fields."""
        self._log_fields(logging.DEBUG, msg, fields)

    def info_with_fields(self, msg: str, **fields: Any) -> None:
        """Log structured progress data.

        Structured records are emitted at DEBUG so the console stays clean;
        use plain info() for user-facing messages.
        """
        self._log_fields(logging.DEBUG, msg, fields)

    def warning_with_fields(self, msg: str, **fields: Any) -> None:
        """Log a warning message with structured fields."""
        self._log_fields(logging.WARNING, msg, fields)

    def error_with_fields(self, msg: str, **fields: Any) -> None:
        """Log an error message with structured fields."""
        self._log_fields(logging.ERROR, msg, fields)


# Global logger instance
_logger_instance: Optional[StructuredLogger] = None


class JsonFormatter(logging.Formatter):
    """Formatter that renders one JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        """Format the log record as JSON."""
        log_entry: JsonDict = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.pathname and record.lineno:
            log_entry["location"] = {
                "file": record.pathname,
                "line": record.lineno,
                "function": record.funcName,
            }

        extra = getattr(record, "extra_fields", None)
        if extra:
            log_entry["fields"] = extra

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)


def _install_handlers(
    logger: StructuredLogger,
    log_file: Optional[Union[str, Path]],
    verbose: bool,
    json_format: bool,
) -> None:
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()

    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    stream_handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(stream_handler)

    if log_file:
        file_handler = logging.FileHandler(str(log_file))
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            JsonFormatter() if json_format else logging.Formatter(PLAIN_FORMAT)
        )
        logger.addHandler(file_handler)


def get_logger() -> StructuredLogger:
    """Get or create the global logger instance."""
    global _logger_instance
    if _logger_instance is None:
        logger = logging.getLogger(LOGGER_NAME)
        # Cast to StructuredLogger since we're changing its class
        logger.__class__ = StructuredLogger
        structured_logger = cast(StructuredLogger, logger)
        _install_handlers(structured_logger, None, False, False)
        _logger_instance = structured_logger
    return _logger_instance


def setup_logging(
    log_file: Optional[Union[str, Path]] = None,
    verbose: bool = False,
    json_format: bool = False,
) -> StructuredLogger:
    """Reconfigure the package logger.

    Args:
        log_file: Optional path receiving every record at DEBUG and above
        verbose: Show debug records on stderr
        json_format: Write the log file as JSON lines

    Returns:
        The configured logger instance
    """
    logger = get_logger()
    _install_handlers(logger, log_file, verbose, json_format)
    return logger
