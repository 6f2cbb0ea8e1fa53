import logging
from typing import Optional

from core.config import get_settings

def configure_logging(level: Optional[str] = None):
    """Configure logging settings for the application"""
    settings = get_settings()
    level_name = (level or settings.LOG_LEVEL).upper()

    # Per-iteration loggers stay quiet unless explicitly debugged
    loggers_to_silence = [
        "core.density",
    ]

    for logger_name in loggers_to_silence:
        logging.getLogger(logger_name).setLevel(
            logging.DEBUG if level_name == "DEBUG" else logging.WARNING
        )

    # Configure root logger
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=settings.LOG_FORMAT
    )
    logging.getLogger().setLevel(getattr(logging, level_name, logging.INFO))
