"""Run configuration tying every component together."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.training import TrainConfig


class SourceKind(str, Enum):
    """Training image source kinds."""

    SINGLE_IMAGE = "single_image"
    FOLDER = "folder"


class ImageSourceDescriptor(BaseModel):
    """Where training images come from."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: SourceKind = Field(default=SourceKind.SINGLE_IMAGE)
    path: str = Field(..., description="Image file or folder path")
    rescale: float = Field(default=1.0, gt=0.0, description="Uniform rescale factor on load")


class RunConfig(BaseModel):
    """Self-consistent experiment description stored with every run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    run_name: str = Field(default="run", min_length=1)
    output_dir: str = Field(default="runs")
    noise: NoiseSpec
    net: NetSpec
    train: TrainConfig
    data: ImageSourceDescriptor

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.net.noise_channels != self.noise.d:
            raise ValueError(
                f"net.noise_channels ({self.net.noise_channels}) must equal "
                f"noise d_l + d_g + d_p ({self.noise.d})"
            )
        factor = 2**self.net.depth
        if self.noise.L != self.noise.M:
            raise ValueError("training noise extent must be square (noise.L == noise.M)")
        if self.train.patch_size != factor * self.noise.L:
            raise ValueError(
                f"train.patch_size ({self.train.patch_size}) must equal "
                f"2^depth * noise.L ({factor * self.noise.L})"
            )
        return self
