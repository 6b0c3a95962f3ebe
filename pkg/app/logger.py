import sys
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator

from loguru import logger as _logger

from app.config import PROJECT_ROOT


_print_level = "INFO"

RUN_LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{line} - {message}"


def define_log_level(print_level="INFO", logfile_level="DEBUG", name: str = None):
    """Adjust the log level to above level"""
    global _print_level
    _print_level = print_level

    formatted_date = datetime.now().strftime("%Y%m%d%H%M%S")
    log_name = f"{name}_{formatted_date}" if name else formatted_date

    _logger.remove()
    _logger.add(sys.stderr, level=print_level)
    _logger.add(PROJECT_ROOT / f"logs/{log_name}.log", level=logfile_level)
    return _logger


@contextmanager
def run_log(out_dir: Path, level: str = "DEBUG") -> Iterator[Path]:
    """Mirror every record into ``<out_dir>/run.log`` while the block runs."""
    target = Path(out_dir) / "run.log"
    target.parent.mkdir(parents=True, exist_ok=True)
    sink_id = _logger.add(target, level=level, format=RUN_LOG_FORMAT, mode="w")
    try:
        yield target
    finally:
        _logger.remove(sink_id)


logger = define_log_level(name="rctrack")
