"""Logger configuration"""

import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import structlog

LOG_PATH_ENV = "WFEXT_LOG_PATH"
LOG_LEVEL_ENV = "WFEXT_LOG_LEVEL"
DEFAULT_LEVEL = logging.WARNING


def _resolve_log_level() -> int:
    name = (os.getenv(LOG_LEVEL_ENV) or "").strip().upper()
    if not name:
        return DEFAULT_LEVEL
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else DEFAULT_LEVEL


def _ensure_writable_log_path(log_path: str) -> bool:
    log_file = Path(log_path)
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        with log_file.open("a", encoding="utf-8"):
            pass
        return True
    except OSError:
        return False


def _resolve_handler() -> logging.Handler:
    # Standard output is reserved for emitted tables and documents
    log_path = os.getenv(LOG_PATH_ENV)
    if log_path and _ensure_writable_log_path(log_path):
        return logging.FileHandler(log_path)
    return logging.StreamHandler(sys.stderr)


def setup_structlog() -> structlog.BoundLogger:
    """Initializes a structured logger"""
    level = _resolve_log_level()

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.make_filtering_bound_logger(level),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(format="%(message)s", handlers=[_resolve_handler()], level=level)

    return structlog.get_logger()


# Initialize logger
logger = setup_structlog()


def log_stage(
    logger_instance: structlog.BoundLogger,
    stage: str,
    **fields,
) -> None:
    """Log the completion of a computation stage with a timezone-aware timestamp."""
    logger_instance.info(
        "Stage completed",
        stage=stage,
        completed_at=datetime.now(timezone.utc).isoformat(),
        **fields,
    )
