"""Configuration settings for the minlab harness."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables.

    Per-experiment parameters live in the experiment config file; these are the
    defaults and limits shared by every run.
    """

    # Logging
    LOG_LEVEL: str = "INFO"

    # Output
    OUTPUT_DIR: str = "reports"

    # Circle systems
    DENJOY_DEPTH: int = 64
    RATIONAL_MAX_DENOMINATOR: int = 1_000_000
    RATIONAL_TOLERANCE: float = 1e-12
    RATIONAL_ULPS: int = 4

    # Blow-up charts
    CHART_RADIUS: float = 0.05

    # Tiling enumeration guard
    WINDOW_RADIUS_LIMIT: int = 4

    # Report metadata
    APP_VERSION: str = "0.3.0"
    APP_TITLE: str = "minlab"

    model_config = SettingsConfigDict(
        env_prefix="MINLAB_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings instance
    """
    return Settings()


settings = get_settings()
