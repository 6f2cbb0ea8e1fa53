import logging
from datetime import datetime
from pathlib import Path
from typing import Union

from core.config import get_settings

def setup_run_logger(log_dir: Union[str, Path]) -> logging.Handler:
    """Attach a dated file handler to the root logger"""
    settings = get_settings()
    directory = Path(log_dir)
    directory.mkdir(parents=True, exist_ok=True)

    formatter = logging.Formatter(settings.LOG_FORMAT)

    # File handler
    file_handler = logging.FileHandler(
        directory / f'{datetime.now().strftime("%Y-%m-%d")}.log'
    )
    file_handler.setFormatter(formatter)
    logging.getLogger().addHandler(file_handler)

    return file_handler
