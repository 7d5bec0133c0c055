import os
import sys
from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator


class Settings(BaseSettings):
    """Application configuration with validation.

    Values come from PLCONVEX_* environment variables or the .env file in
    the project root. See .env.example for a complete template.
    """

    # ===== Application Metadata =====
    APP_NAME: str = "plconvex"
    VERSION: str = "1.0.0"
    DEBUG: bool = Field(default=False, description="Enable debug logging")

    # ===== Checker Configuration =====
    PROBE_MAX_ATTEMPTS: int = Field(
        default=64,
        ge=1,
        le=4096,
        description="Generic-probe resampling bound for covering multiplicity"
    )
    PROBE_SEED: int = Field(
        default=0,
        ge=0,
        description="Offset of the deterministic generic-probe sequence (--seed on check and decompose)"
    )
    VERTEX_CHECK_METHOD: str = Field(
        default="both",
        description="Vertex local-convexity method: both, hull or link"
    )
    JOBS: int = Field(
        default=1,
        ge=1,
        le=256,
        description="Worker processes for per-vertex checks"
    )

    # ===== Generators =====
    DEFAULT_SEED: int = Field(default=1, ge=0, description="Seed used when --seed is omitted")
    COORD_BOUND: int = Field(
        default=1000,
        ge=4,
        le=10**9,
        description="Numerators of generated coordinates lie in [-bound, bound]"
    )

    # ===== Reports =====
    REPORT_FORMAT: str = Field(default="json", description="Report format: json or text")
    REPORT_TIMINGS: bool = Field(
        default=False,
        description="Include wall-clock timings (reports stop being byte-identical)"
    )

    # ===== Logging =====
    LOG_TO_FILE: bool = Field(default=False, description="Also log to a rotating file")
    LOG_DIR: str = Field(
        default="",
        description="Log directory (empty for default)"
    )
    LOG_MAX_SIZE_MB: int = Field(
        default=10,
        ge=1,
        le=100,
        description="Maximum log file size in MB"
    )
    LOG_BACKUP_COUNT: int = Field(
        default=5,
        ge=1,
        le=20,
        description="Number of backup log files"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="PLCONVEX_",
        case_sensitive=True,
        extra="ignore"  # Ignore extra fields in .env
    )

    @field_validator('VERTEX_CHECK_METHOD')
    @classmethod
    def validate_vertex_method(cls, v: str) -> str:
        """Normalize and validate the vertex check method."""
        v = v.strip().lower()
        if v not in ("both", "hull", "link"):
            raise ValueError("VERTEX_CHECK_METHOD must be one of: both, hull, link")
        return v

    @field_validator('REPORT_FORMAT')
    @classmethod
    def validate_report_format(cls, v: str) -> str:
        v = v.strip().lower()
        if v not in ("json", "text"):
            raise ValueError("REPORT_FORMAT must be json or text")
        return v

    def get_log_dir(self) -> Path:
        """Get the log directory path."""
        if self.LOG_DIR:
            return Path(self.LOG_DIR)
        # Default: ~/.plconvex/logs
        return Path.home() / ".plconvex" / "logs"


def load_settings() -> Settings:
    """Load and validate settings with friendly error messages."""
    try:
        return Settings()
    except Exception as e:
        print(f"\n❌ Configuration Error: {e}\n", file=sys.stderr)
        print("💡 Tips:", file=sys.stderr)
        print("   1. Settings are read from PLCONVEX_* variables or .env", file=sys.stderr)
        print("   2. Copy .env.example to .env and edit the values", file=sys.stderr)
        print(f"   Current directory: {os.getcwd()}", file=sys.stderr)
        print(f"   Looking for .env at: {Path('.env').absolute()}\n", file=sys.stderr)
        sys.exit(2)


# Load settings on module import
settings = load_settings()
