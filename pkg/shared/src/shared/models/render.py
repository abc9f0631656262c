"""Render plans for the sampler."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GlobalMode(str, Enum):
    """How the global part Z^g is laid out in space."""

    BROADCAST = "broadcast"
    QUILT = "quilt"
    BILINEAR = "bilinear"
    LINEAR = "linear"
    EXPLICIT = "explicit"


class PeriodicSource(str, Enum):
    """Where the wave numbers of the periodic part come from."""

    COUPLED = "coupled"
    OVERRIDDEN = "overridden"
    EXPLICIT = "explicit"
    QUILTED = "quilted"


class RenderPlan(BaseModel):
    """Everything needed to reproduce one rendered image from a checkpoint."""

    model_config = ConfigDict(extra="forbid")

    L_out: int = Field(..., ge=1, description="Noise rows")
    M_out: int = Field(..., ge=1, description="Noise columns")
    global_mode: GlobalMode = Field(default=GlobalMode.BROADCAST)
    delta: Optional[int] = Field(default=None, ge=1, description="Quilt tile edge in noise units")
    z_g: Optional[list[float]] = Field(default=None, description="Broadcast global vector")
    corners: Optional[list[list[float]]] = Field(
        default=None,
        description="Bilinear corners (top-left, top-right, bottom-left, bottom-right) "
        "or linear endpoints (left, right)",
    )
    global_values: Optional[list[list[list[float]]]] = Field(
        default=None, description="Explicit L_out x M_out x d_g global field"
    )
    periodic_source: PeriodicSource = Field(default=PeriodicSource.COUPLED)
    periodic_z_g: Optional[list[float]] = Field(
        default=None, description="Global vector whose wave numbers are used everywhere"
    )
    wavenumbers: Optional[list[list[float]]] = Field(
        default=None, description="Explicit 2 x d_p wave-number matrix"
    )
    seed: int = Field(default=0, ge=0)
    chunk: int = Field(default=0, ge=0, description="Max noise chunk extent, 0 = monolithic")
    tileable: bool = Field(default=False)

    @model_validator(mode="after")
    def _check_mode(self) -> "RenderPlan":
        if self.global_mode == GlobalMode.QUILT and self.delta is None:
            raise ValueError("quilt mode requires delta")
        if self.global_mode == GlobalMode.BILINEAR and self.corners is not None:
            if len(self.corners) != 4:
                raise ValueError("bilinear mode takes exactly 4 corner vectors")
        if self.global_mode == GlobalMode.LINEAR and self.corners is not None:
            if len(self.corners) != 2:
                raise ValueError("linear mode takes exactly 2 endpoint vectors")
        if self.periodic_source == PeriodicSource.EXPLICIT and self.wavenumbers is None:
            raise ValueError("explicit periodic source requires wavenumbers")
        if self.periodic_source == PeriodicSource.QUILTED and self.delta is None:
            raise ValueError("quilted periodic source requires delta")
        if self.global_mode == GlobalMode.EXPLICIT and self.global_values is None:
            raise ValueError("explicit global mode requires global_values")
        if self.tileable and self.global_mode != GlobalMode.BROADCAST:
            raise ValueError("tileable rendering requires broadcast global mode")
        if self.tileable and self.periodic_source == PeriodicSource.QUILTED:
            raise ValueError("tileable rendering requires one wave-number matrix for the image")
        return self
