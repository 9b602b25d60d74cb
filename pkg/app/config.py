"""
Application configuration using Pydantic Settings
"""
from pathlib import Path
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    APP_NAME: str = "Hercules CC Lab"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: str = "development"

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # Experiment outputs
    OUTPUT_DIR: str = Field(default="results", description="Default directory for CSV/JSON outputs")
    SCENARIO_DIR: str = Field(default="scenarios", description="Directory holding bundled scenario files")
    MAX_WORKERS: int = Field(default=1, ge=1, description="Trials run concurrently (1 = serial)")

    # Simulator defaults
    DEFAULT_TICK: float = Field(default=0.001, gt=0, description="Fluid simulation tick in seconds")
    RECORD_INTERVAL: float = Field(default=0.01, gt=0, description="Seconds between time-series rows")
    PACKET_SIZE_BITS: int = Field(default=12_000, gt=0, description="Granularity of random-loss thinning")

    # Oracles
    BRUTE_FORCE_BUDGET: int = Field(default=2_000_000, gt=0, description="Max grid vectors enumerated")

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    @property
    def scenario_path(self) -> Path:
        """Bundled scenario directory, resolved against the repository root when relative"""
        path = Path(self.SCENARIO_DIR)
        if path.is_absolute():
            return path
        return Path(__file__).resolve().parent.parent / path


# Global settings instance
settings = Settings()
