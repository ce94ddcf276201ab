"""Runtime settings.

Values come from MULTICONTRACT_* environment variables or a local .env file.
Explicit function arguments always win over these defaults.
"""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults for comparisons, parallelism and logging."""

    model_config = SettingsConfigDict(
        env_prefix="MULTICONTRACT_",
        env_file=".env",
        extra="ignore",
    )

    tolerance: float = Field(1e-9, ge=0.0, description="Absolute comparison slack")
    workers: int | None = Field(None, ge=1, description="Worker processes; None means all CPUs")
    max_steps: int = Field(1000, ge=1, description="Default Picard iteration budget")
    log_level: str = Field("WARNING", description="Root logging level for the CLI")

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1


@lru_cache
def get_settings() -> Settings:
    """Return the cached settings instance."""
    return Settings()


def resolve_tolerance(tolerance: float | None) -> float:
    """Use the explicit tolerance if given, else the configured default."""
    return get_settings().tolerance if tolerance is None else tolerance
