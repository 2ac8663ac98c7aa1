"""Global logging setup for the API server and the batch CLI."""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, TextIO

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# third-party loggers kept at INFO or above whatever the root level is
QUIET_LOGGERS = ("uvicorn.access", "uvicorn.error", "httpx")


def _resolve_level(log_level: str) -> int:
    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        # unknown name
        return logging.INFO
    return level


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    max_file_size: int = 10 * 1024 * 1024,
    backup_count: int = 5,
    stream: TextIO = sys.stdout,
) -> None:
    """Configure the root logger.

    Attributes
    ----------
    log_level: Name of the root level; unknown names mean INFO
    log_file: Optional rotating log file, its directory is created
    max_file_size: Bytes per log file before rotation
    backup_count: Number of rotated files to keep
    stream: Console stream; the CLI passes stderr so stdout carries only JSON

    numpy/scipy ``RuntimeWarning``s (overflow in a sweep, ill-conditioned
    solves) are routed through ``py.warnings`` into the same handlers.
    """
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers: list = [logging.StreamHandler(stream)]

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            RotatingFileHandler(log_file, maxBytes=max_file_size, backupCount=backup_count)
        )

    root_logger = logging.getLogger()
    root_logger.setLevel(_resolve_level(log_level))
    root_logger.handlers.clear()
    for handler in handlers:
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    logging.captureWarnings(True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(logging.INFO, root_logger.level))
