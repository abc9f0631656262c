"""Pydantic BaseSettings for process-level runtime options."""

from functools import lru_cache
from typing import Literal

import torch
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseServiceSettings(BaseSettings):
    """Base settings class for all components."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    env: str = Field(default="development", description="Environment (development/production)")
    log_level: str = Field(default="INFO", description="Logging level")
    json_logs: bool = Field(default=False, description="Emit JSON log lines")


class RuntimeSettings(BaseServiceSettings):
    """Compute and I/O settings shared by training, sampling and evaluation."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        env_prefix="PTGAN_",
    )

    device: Literal["auto", "cpu", "cuda"] = Field(default="auto", description="Torch device")
    dtype: Literal["float32", "float64"] = Field(default="float32", description="Tensor dtype")
    num_workers: int = Field(default=0, ge=0, description="Patch prefetch worker processes")
    prefetch_factor: int = Field(default=2, ge=1, description="Batches prefetched per worker")
    runs_dir: str = Field(default="runs", description="Default parent directory for run outputs")
    default_chunk: int = Field(
        default=0, ge=0, description="Default render chunk extent in noise units (0 = monolithic)"
    )

    @property
    def torch_device(self) -> torch.device:
        """Return the resolved torch device."""
        if self.device == "auto":
            return torch.device("cuda" if torch.cuda.is_available() else "cpu")
        return torch.device(self.device)

    @property
    def torch_dtype(self) -> torch.dtype:
        """Return the configured floating point dtype."""
        return torch.float64 if self.dtype == "float64" else torch.float32


@lru_cache()
def get_runtime_settings() -> RuntimeSettings:
    """Get cached runtime settings."""
    return RuntimeSettings()
