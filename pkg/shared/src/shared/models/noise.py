"""Noise tensor layout contract."""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class NoiseSpec(BaseModel):
    """Channel cardinalities, spatial extent and prior of a structured noise tensor."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    d_l: int = Field(default=10, ge=0, description="Local (i.i.d.) channel count")
    d_g: int = Field(default=0, ge=0, description="Global channel count")
    d_p: int = Field(default=2, ge=0, description="Periodic (plane wave) channel count")
    L: int = Field(default=5, ge=1, description="Spatial extent along rows (lambda)")
    M: int = Field(default=5, ge=1, description="Spatial extent along columns (mu)")
    prior_low: float = Field(default=-1.0, description="Lower bound of the uniform prior")
    prior_high: float = Field(default=1.0, description="Upper bound of the uniform prior")
    d_h: int = Field(default=60, ge=1, description="Hidden width of the wave-number MLP")

    @model_validator(mode="after")
    def _check_layout(self) -> "NoiseSpec":
        if self.d < 1:
            raise ValueError("total channel dimension d_l + d_g + d_p must be at least 1")
        if not self.prior_low < self.prior_high:
            raise ValueError("prior_low must be smaller than prior_high")
        return self

    @property
    def d(self) -> int:
        """Total channel dimension."""
        return self.d_l + self.d_g + self.d_p

    def with_extent(self, L: int, M: int) -> "NoiseSpec":
        """Return a copy with a different spatial extent."""
        return self.model_copy(update={"L": L, "M": M})
