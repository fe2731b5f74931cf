"""Logging configuration for the minlab harness."""

import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Dict, Iterator

from pythonjsonlogger import jsonlogger

# present on every record, null outside a run
RUN_FIELDS = ("seed", "kind", "probe")

_run_fields: ContextVar[Dict[str, Any]] = ContextVar("minlab_run_fields", default={})


class RunContextFilter(logging.Filter):
    """Stamp the fields of the current run on records from any module logger."""

    def filter(self, record: logging.LogRecord) -> bool:
        for key, value in _run_fields.get().items():
            if not hasattr(record, key):
                setattr(record, key, value)
        return True


class RunJsonFormatter(jsonlogger.JsonFormatter):
    """JSON formatter that always emits the run fields."""

    def add_fields(
        self, log_record: Dict[str, Any], record: logging.LogRecord, message_dict: Dict[str, Any]
    ) -> None:
        super().add_fields(log_record, record, message_dict)
        for key in RUN_FIELDS:
            log_record.setdefault(key, getattr(record, key, None))


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """Attach run fields (seed, system kind, probe name) to records logged inside the block.

    Blocks nest; inner fields override outer ones until the inner block exits.
    """
    token = _run_fields.set({**_run_fields.get(), **fields})
    try:
        yield
    finally:
        _run_fields.reset(token)


def setup_logging(log_level: str = "INFO") -> None:
    """Setup structured JSON logging on stderr.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    logger = logging.getLogger()

    # Remove existing handlers
    logger.handlers.clear()

    logger.setLevel(getattr(logging, log_level.upper()))

    # stdout carries the run summary
    handler = logging.StreamHandler(sys.stderr)
    handler.addFilter(RunContextFilter())
    handler.setFormatter(
        RunJsonFormatter(
            "%(asctime)s %(name)s %(levelname)s %(message)s",
            rename_fields={"asctime": "timestamp", "levelname": "level"},
        )
    )
    logger.addHandler(handler)


class LoggerAdapter(logging.LoggerAdapter):
    """Logger adapter that merges fixed context into every record."""

    def process(self, msg: str, kwargs: Dict[str, Any]) -> tuple:
        kwargs.setdefault("extra", {}).update(self.extra)
        return msg, kwargs


def get_logger(name: str, **extra: Any) -> LoggerAdapter:
    """Get a logger with extra context (output directory, ...)."""
    return LoggerAdapter(logging.getLogger(name), extra)
