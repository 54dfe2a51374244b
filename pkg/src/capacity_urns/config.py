"""Environment-backed configuration helpers."""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from typing import Optional

import psutil
from dotenv import load_dotenv
from platformdirs import user_log_dir

BASE_DIR = Path(__file__).resolve().parents[2]
APP_NAME = "capacity-urns"
DEFAULT_DP_CELL_LIMIT = 100_000_000
DEFAULT_BINOMIAL_CACHE_SIZE = 65_536
DEFAULT_LOG_LEVEL = "WARNING"
# Only auto-load the .env file when not running under pytest to let tests
# control environment via monkeypatch.
_running_under_pytest = bool(os.getenv("PYTEST_CURRENT_TEST")) or any(
    "pytest" in (arg or "") for arg in sys.argv
)
if not _running_under_pytest:
    load_dotenv(BASE_DIR / ".env")

logger = logging.getLogger("capacity_urns.config")


def _positive_int_env(key: str, default: int) -> int:
    raw = os.getenv(key)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Invalid %s '%s' - expected integer", key, raw)
        return default
    if value <= 0:
        logger.warning("Invalid %s '%s' - expected a positive integer", key, raw)
        return default
    return value


def _physical_cores() -> int:
    try:
        cores = psutil.cpu_count(logical=False)
    except Exception:  # pragma: no cover - platform specific
        cores = None
    return cores or 1


class Config:
    """Central configuration loaded from environment variables."""

    BASE_DIR = BASE_DIR
    DP_CELL_LIMIT = _positive_int_env("CAPACITY_URNS_DP_CELL_LIMIT", DEFAULT_DP_CELL_LIMIT)
    BINOMIAL_CACHE_SIZE = _positive_int_env(
        "CAPACITY_URNS_BINOMIAL_CACHE_SIZE", DEFAULT_BINOMIAL_CACHE_SIZE
    )
    LOG_LEVEL = (os.getenv("CAPACITY_URNS_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    LOG_DIR = Path(os.getenv("CAPACITY_URNS_LOG_DIR") or user_log_dir(APP_NAME)).expanduser()
    JOBS = _positive_int_env("CAPACITY_URNS_JOBS", _physical_cores())

    @staticmethod
    def log_file() -> Path:
        return Config.LOG_DIR / f"{APP_NAME}.log"


def get_dp_cell_limit() -> int:
    """Return the oracle table ceiling, honouring runtime environment overrides."""

    return _positive_int_env("CAPACITY_URNS_DP_CELL_LIMIT", Config.DP_CELL_LIMIT)


def get_default_jobs() -> int:
    return _positive_int_env("CAPACITY_URNS_JOBS", Config.JOBS)


def resolve_log_level(name: Optional[str] = None) -> int:
    """Translate a level name into a ``logging`` constant, falling back to WARNING."""

    candidate = (name or Config.LOG_LEVEL).upper()
    level = logging.getLevelName(candidate)
    if isinstance(level, int):
        return level
    logger.warning("Invalid log level '%s'; falling back to %s", candidate, DEFAULT_LOG_LEVEL)
    return logging.WARNING
