"""Application configuration using pydantic settings."""

import logging

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки процесса (переменные окружения и .env)."""

    # Logging
    BLUFS_LOG: str = "INFO"
    BLUFS_LOG_FILE: str | None = None

    # Размер пула воркеров по умолчанию (None = все доступные ядра)
    BLUFS_WORKERS: int | None = None

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", case_sensitive=True, extra="ignore"
    )

    @property
    def log_level(self) -> int:
        """Преобразует имя уровня логирования в константу logging."""
        level = logging.getLevelName(self.BLUFS_LOG.strip().upper())
        if not isinstance(level, int):
            return logging.INFO
        return level


settings = Settings()
