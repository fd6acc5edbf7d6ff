"""
Application configuration using Pydantic Settings.

Settings come from ``CONSENTCHAIN_*`` environment variables and an optional
``.env`` file. File locations are grouped under ``PathSettings``; relative
paths resolve under ``data_dir``.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class PathSettings(BaseSettings):
    """Locations of the node's persistent files."""

    model_config = SettingsConfigDict(env_prefix="CONSENTCHAIN_PATH_", extra="ignore")

    data_dir: Path = Field(default=Path("var"), description="Base directory for node files")
    registry: Path = Field(default=Path("registry.txt"), description="Registry bootstrap file")
    network: Path = Field(default=Path("network.conf"), description="Network config file")
    chain_log: Path = Field(default=Path("chain.log"), description="Append-only chain log")
    offchain_dir: Path = Field(default=Path("offchain"), description="Off-chain payload store")

    def resolve(self, path: Path) -> Path:
        """Resolve ``path`` against ``data_dir`` unless it is absolute."""
        return path if path.is_absolute() else self.data_dir / path

    @property
    def registry_path(self) -> Path:
        """Absolute-or-data-dir registry path."""
        return self.resolve(self.registry)

    @property
    def network_path(self) -> Path:
        """Absolute-or-data-dir network config path."""
        return self.resolve(self.network)

    @property
    def chain_log_path(self) -> Path:
        """Absolute-or-data-dir chain log path."""
        return self.resolve(self.chain_log)

    @property
    def offchain_path(self) -> Path:
        """Absolute-or-data-dir off-chain store directory."""
        return self.resolve(self.offchain_dir)


class Settings(BaseSettings):
    """
    Main application settings.

    Aggregates the path section with server and logging options.
    """

    model_config = SettingsConfigDict(
        env_prefix="CONSENTCHAIN_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    environment: Literal["development", "production", "test"] = Field(
        default="development", description="Application environment"
    )
    addr: str = Field(default="127.0.0.1:8000", description="Bind address of the nodal API")
    log_level: str = Field(default="INFO", description="Minimum log level")
    json_logs: bool = Field(default=False, description="Render logs as JSON lines")

    paths: PathSettings = Field(default_factory=PathSettings)

    @field_validator("addr")
    @classmethod
    def _check_addr(cls, value: str) -> str:
        """Require ``host:port`` with a numeric port."""
        host, sep, port = value.rpartition(":")
        if not sep or not host or not port.isdigit():
            msg = f"addr must be host:port, got {value!r}"
            raise ValueError(msg)
        return value

    @property
    def bind_host(self) -> str:
        """Host part of ``addr``."""
        return self.addr.rpartition(":")[0]

    @property
    def bind_port(self) -> int:
        """Port part of ``addr``."""
        return int(self.addr.rpartition(":")[2])

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.environment == "production"


@lru_cache
def get_settings() -> Settings:
    """
    Get cached application settings.

    Returns:
        Configured Settings instance.
    """
    return Settings()
