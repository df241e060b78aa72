import sys

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {extra[component]} | {message}"


def setup_logging(level: str = "WARNING") -> None:
    """Send log records to stderr; stdout carries report data only."""
    logger.remove()
    logger.configure(extra={"component": "powmon"})
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
