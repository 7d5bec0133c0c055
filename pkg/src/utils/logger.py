import logging
import re
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

# Exact coordinates can grow to thousands of digits
_LONG_NUMBER = re.compile(r"\d{41,}")


def abbreviate_numbers(message: str, keep: int = 12) -> str:
    """
    Shorten very long digit runs in a log message.

    Args:
        message: The log message
        keep: Digits kept at each end of a long run

    Returns:
        Message with runs longer than 40 digits elided in the middle
    """
    return _LONG_NUMBER.sub(
        lambda m: f"{m.group(0)[:keep]}…<{len(m.group(0))} digits>…{m.group(0)[-keep:]}",
        message,
    )


class LongNumberFilter(logging.Filter):
    """
    Logging filter that abbreviates huge integers in log records.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        if isinstance(record.msg, str):
            record.msg = abbreviate_numbers(record.msg)
        if record.args:
            try:
                record.args = tuple(
                    abbreviate_numbers(arg) if isinstance(arg, str) else arg
                    for arg in record.args
                )
            except (TypeError, ValueError):
                pass
        return True


class ColoredFormatter(logging.Formatter):
    """
    Colored log formatter for console output.
    Only adds colors when stderr is a terminal.
    """

    COLORS = {
        'DEBUG': '\033[36m',    # Cyan
        'INFO': '\033[32m',     # Green
        'WARNING': '\033[33m',  # Yellow
        'ERROR': '\033[31m',    # Red
        'CRITICAL': '\033[35m', # Magenta
        'RESET': '\033[0m'
    }

    def __init__(self, fmt: str, datefmt: Optional[str] = None, use_colors: bool = True):
        super().__init__(fmt, datefmt)
        self.use_colors = use_colors and sys.stderr.isatty()

    def format(self, record: logging.LogRecord) -> str:
        if self.use_colors and record.levelname in self.COLORS:
            record = logging.makeLogRecord(record.__dict__)
            record.levelname = f"{self.COLORS[record.levelname]}{record.levelname}{self.COLORS['RESET']}"
        return super().format(record)


def setup_logger(name: str) -> logging.Logger:
    """
    Configure and return a logger.

    Console output always goes to stderr so that stdout carries only
    reports and generated files. DEBUG switches to the detailed colored
    format; LOG_TO_FILE adds a rotating file handler.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Prevent duplicate handlers
    if logger.handlers:
        return logger

    # Import settings here to avoid circular import
    from config import settings

    level = logging.DEBUG if settings.DEBUG else logging.INFO
    logger.setLevel(level)

    # ===== Console Handler =====
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)

    if settings.DEBUG:
        console_formatter = ColoredFormatter(
            fmt="%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s:%(lineno)d - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
            use_colors=True
        )
    else:
        console_formatter = logging.Formatter(fmt="%(levelname)-8s | %(message)s")

    console_handler.setFormatter(console_formatter)
    console_handler.addFilter(LongNumberFilter())
    logger.addHandler(console_handler)

    # ===== File Handler =====
    if settings.LOG_TO_FILE:
        try:
            log_dir = settings.get_log_dir()
            log_dir.mkdir(parents=True, exist_ok=True)
            log_file = log_dir / "plconvex.log"

            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=settings.LOG_MAX_SIZE_MB * 1024 * 1024,
                backupCount=settings.LOG_BACKUP_COUNT,
                encoding='utf-8'
            )
            file_handler.setLevel(logging.INFO)
            file_handler.setFormatter(logging.Formatter(
                fmt="%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s:%(lineno)d - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S"
            ))
            file_handler.addFilter(LongNumberFilter())
            logger.addHandler(file_handler)
        except Exception as e:
            logger.warning(f"Failed to setup file logging: {e}")

    return logger
