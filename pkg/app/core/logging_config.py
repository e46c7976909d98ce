"""Logging configuration."""

import logging
import sys
from pathlib import Path

from app.core.config import settings


def setup_logging(log_file: Path | None = None):
    """
    Настройка логирования для приложения.

    Логи выводятся в stderr (диагностический поток) и опционально в файл.

    Args:
        log_file: Путь к файлу логов; если не задан, берется BLUFS_LOG_FILE
    """
    log_level = settings.log_level

    # Формат логов
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    date_format = "%Y-%m-%d %H:%M:%S"

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file is None and settings.BLUFS_LOG_FILE:
        log_file = Path(settings.BLUFS_LOG_FILE)
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    # Настраиваем root logger (force: повторный вызов из тестов перенастраивает)
    logging.basicConfig(
        level=log_level,
        format=log_format,
        datefmt=date_format,
        handlers=handlers,
        force=True,
    )

    # Настраиваем логгеры сторонних библиотек
    logging.getLogger("joblib").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("numba").setLevel(logging.WARNING)

    logger = logging.getLogger(__name__)
    logger.debug(f"Logging configured. Level: {logging.getLevelName(log_level)}")

