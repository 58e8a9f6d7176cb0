"""
Logger setup for the library and command-line tool.
"""
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from varcheck.config import Config


def setup_logger(app_name: str = 'varcheck', level: Optional[str] = None) -> logging.Logger:
    """
    Set up package logging with the following features:
    - Logs to the console and, unless disabled in Config, to a rotating file
    - Includes timestamp, logger name, level and message
    - Creates the log directory if it doesn't exist
    - Safe to call repeatedly: handlers are installed only once
    """
    logger = logging.getLogger(app_name)
    logger.setLevel(logging.DEBUG)

    console_level = getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.INFO)

    if getattr(logger, '_varcheck_configured', False):
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, RotatingFileHandler):
                handler.setLevel(console_level)
        return logger

    log_format = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    if Config.LOG_TO_FILE:
        log_dir = Path(Config.LOG_DIR)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / 'varcheck.log'

        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10000000,  # 10MB
            backupCount=5
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(log_format)
        logger.addHandler(file_handler)

    # stderr only; stdout carries tables
    console_handler = logging.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(log_format)
    logger.addHandler(console_handler)

    logger._varcheck_configured = True
    return logger
