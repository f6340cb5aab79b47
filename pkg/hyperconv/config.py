"""
Runtime settings read from HYPERCONV_* environment variables
"""
from functools import lru_cache
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class HyperconvSettings(BaseSettings):
    """Defaults for windows, depths and parallelism; CLI flags take precedence"""
    model_config = SettingsConfigDict(env_prefix="HYPERCONV_", extra="ignore")

    threads: int = Field(default=1, ge=1)
    window: int = Field(default=12, ge=1)
    depth: int = Field(default=3, ge=1)
    seed: int = 0
    property_cases: int = Field(default=100, ge=1)
    log_level: str = "WARNING"
    debug: bool = False

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Invalid log level {value!r}: must be one of {', '.join(LOG_LEVELS)}")
        return level

    def effective_log_level(self, override: Optional[str] = None) -> str:
        if self.debug:
            return "DEBUG"
        return (override or self.log_level).upper()


@lru_cache(maxsize=1)
def get_settings() -> HyperconvSettings:
    return HyperconvSettings()
