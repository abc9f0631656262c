"""Generator / discriminator layer plan."""

from pydantic import BaseModel, ConfigDict, Field, field_validator


class NetSpec(BaseModel):
    """Symmetric fully convolutional architecture description."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    depth: int = Field(default=5, ge=1, description="Number of conv layers in G and D")
    kernel: int = Field(default=5, ge=1, description="Spatial kernel size")
    base_channels: int = Field(default=64, ge=1, description="Channels at highest resolution")
    max_channels: int = Field(default=512, ge=1, description="Cap for channel doubling")
    noise_channels: int = Field(default=12, ge=1, description="Generator input channels d")
    image_channels: int = Field(default=3, ge=1, description="Image channels")
    use_batchnorm_g: bool = Field(default=True, description="Batch norm between G layers")
    use_batchnorm_d: bool = Field(default=False, description="Batch norm between D layers")
    leaky_slope: float = Field(default=0.2, ge=0.0, description="Leaky rectifier slope in D")

    @field_validator("kernel")
    @classmethod
    def _odd_kernel(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("kernel must be odd")
        return value

    def hidden_channels(self) -> list[int]:
        """Channel counts of the hidden feature maps, ordered from the image side."""
        return [
            min(self.base_channels * 2**layer, self.max_channels)
            for layer in range(self.depth - 1)
        ]
