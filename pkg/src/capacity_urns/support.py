"""Logging setup and thread-safe counters shared by the command line tools."""

from __future__ import annotations

import json
import logging
import sys
import threading
from collections import Counter
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

__all__ = ["GridMetrics", "setup_logging"]


class GridMetrics:
    """Store counters for a verification sweep."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.specs_checked = 0
        self.mismatches = 0
        self.infeasible = 0
        self.labels: Counter = Counter()

    def record(self, label: str, *, infeasible: bool, mismatch: bool) -> None:
        with self._lock:
            self.specs_checked += 1
            self.labels[label] += 1
            if infeasible:
                self.infeasible += 1
            if mismatch:
                self.mismatches += 1

    def snapshot(self) -> Dict[str, object]:
        with self._lock:
            return {
                "specs_checked": self.specs_checked,
                "mismatches": self.mismatches,
                "infeasible": self.infeasible,
                "labels": dict(sorted(self.labels.items())),
            }


class _JsonFormatter(logging.Formatter):
    _RESERVED_KEYS = {
        "name",
        "msg",
        "args",
        "levelname",
        "levelno",
        "pathname",
        "filename",
        "module",
        "exc_info",
        "exc_text",
        "stack_info",
        "lineno",
        "funcName",
        "created",
        "msecs",
        "relativeCreated",
        "thread",
        "threadName",
        "processName",
        "process",
        "message",
        "asctime",
        "taskName",
    }

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
            "time": self.formatTime(record, "%Y-%m-%dT%H:%M:%SZ"),
        }
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        # Keys passed through logger.x(..., extra={...}) land on the record itself.
        for key, value in record.__dict__.items():
            if key in self._RESERVED_KEYS or key.startswith("_"):
                continue
            payload.setdefault(key, value)
        return json.dumps(payload, default=str)


def setup_logging(
    level: int = logging.WARNING,
    *,
    json_format: bool = False,
    log_file: Optional[Path] = None,
) -> logging.Logger:
    """Configure the ``capacity_urns`` logger tree.

    Console output goes to stderr so command results on stdout stay byte-stable.
    """

    logger = logging.getLogger("capacity_urns")
    logger.setLevel(level)
    logger.handlers.clear()

    formatter: logging.Formatter
    if json_format:
        formatter = _JsonFormatter()
    else:
        formatter = logging.Formatter("%(asctime)s | %(name)s | %(levelname)s | %(message)s")

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024, backupCount=3)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    return logger
