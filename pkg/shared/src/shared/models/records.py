"""Structured records emitted by training, sampling and evaluation."""

from typing import Literal, Optional

from pydantic import BaseModel, Field


class MetricRecord(BaseModel):
    """One line of the training metric stream."""

    step: int = Field(..., ge=0)
    d_loss: float
    g_loss: float
    d_real_mean: float
    d_fake_mean: float


class RenderStats(BaseModel):
    """Working-set statistics of one render call."""

    chunks: int = Field(default=1, ge=1)
    peak_chunk_cells: int = Field(default=0, ge=0, description="Largest noise chunk, L*M")
    peak_chunk_pixels: int = Field(default=0, ge=0, description="Largest rendered chunk, H*W")
    peak_device_bytes: Optional[int] = Field(
        default=None, ge=0, description="CUDA allocator peak above the starting allocation"
    )
    seconds: float = Field(default=0.0, ge=0.0)


class PeriodMatch(BaseModel):
    """Learned period vector of one periodic channel and its matched autocorrelation peak."""

    channel: int = Field(..., ge=0)
    wavevector: tuple[float, float] = Field(..., description="Radians per noise unit")
    learned_period: Optional[tuple[float, float]] = Field(
        default=None, description="Period vector in pixels, None for a zero wave vector"
    )
    matched_peak: Optional[tuple[int, int]] = None
    abs_error_px: Optional[float] = None
    relative_error: Optional[float] = None
    axis_relative_error: Optional[tuple[float, float]] = None


class ConsistencyReport(BaseModel):
    """Comparison of learned wave numbers with image periodicity."""

    status: Literal["consistent", "inconsistent", "aperiodic"]
    depth: int = Field(..., ge=1)
    tolerance: float = Field(default=0.15, ge=0.0)
    peaks: list[tuple[int, int]] = Field(default_factory=list)
    matches: list[PeriodMatch] = Field(default_factory=list)
    max_relative_error: Optional[float] = None
    min_relative_error: Optional[float] = None


class LocalityBox(BaseModel):
    """Bounding box of pixels changed by a single noise-column perturbation."""

    empty: bool
    top: int = 0
    left: int = 0
    bottom: int = 0
    right: int = 0

    @property
    def height(self) -> int:
        """Box height in pixels (0 when empty)."""
        return 0 if self.empty else self.bottom - self.top + 1

    @property
    def width(self) -> int:
        """Box width in pixels (0 when empty)."""
        return 0 if self.empty else self.right - self.left + 1
