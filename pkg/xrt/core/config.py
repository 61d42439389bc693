from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="XRT_",
        env_file=".env",
        case_sensitive=True,
        validate_assignment=True,
        extra="ignore",
    )

    # Project Information
    PROJECT_NAME: str = "xray-transform"
    PROJECT_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "simple"
    LOG_DIR: Optional[Path] = None
    LOG_MAX_BYTES: int = 10 * 1024 * 1024
    LOG_BACKUP_COUNT: int = 5

    # Execution
    DEFAULT_THREADS: int = 1

    # Self-test oracle sweep
    SELFTEST_ORACLE_RAYS: int = 200
    SELFTEST_SEED: int = 2020

    @field_validator("LOG_LEVEL")
    @classmethod
    def _check_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{value}'")
        return level

    @field_validator("LOG_FORMAT")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value not in {"simple", "json"}:
            raise ValueError("LOG_FORMAT must be 'simple' or 'json'")
        return value

    @field_validator("DEFAULT_THREADS", "SELFTEST_ORACLE_RAYS", "LOG_BACKUP_COUNT")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.DEBUG else self.LOG_LEVEL


@lru_cache
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()
