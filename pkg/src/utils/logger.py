"""
Logging configuration
"""
import logging
from pathlib import Path
from typing import Optional, Union
from config.settings import LOG_LEVEL, LOG_FILE

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None,
                  log_file: Optional[Union[str, Path]] = None) -> logging.Logger:
    """
    Configure the root logger once for command-line runs

    Args:
        level: Log level name (defaults to LOG_LEVEL from settings)
        log_file: Optional file sink (defaults to LOG_FILE from settings)

    Returns:
        The configured root logger
    """
    level = (level or LOG_LEVEL).upper()
    log_file = log_file or LOG_FILE

    handlers = [logging.StreamHandler()]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)

    root = logging.getLogger()
    root.debug(f"Logging configured at {level}")
    return root
