"""Synthetic textures with known periodicity, used as fixtures and smoke-test data."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from data_ingest.sources import encode_image
from shared.exceptions import ArtifactIOError, ValidationError


class SynthKind(str, Enum):
    """Available synthetic texture families."""

    STRIPES = "stripes"
    CHECKERBOARD = "checkerboard"
    HEXGRID = "hexgrid"
    COLORED_NOISE = "colored_noise"


def _grid(size: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    rows = np.arange(size[0], dtype=np.float64)[:, None]
    cols = np.arange(size[1], dtype=np.float64)[None, :]
    return rows, cols


def _to_rgb(gray: np.ndarray) -> np.ndarray:
    return np.repeat(gray[..., None], 3, axis=2)


def synth_texture(
    kind: SynthKind | str,
    size: int | tuple[int, int],
    *,
    period: float = 16.0,
    angle: float = 0.0,
    seed: int = 0,
    sigma: float = 2.0,
) -> np.ndarray:
    """
    Render a deterministic synthetic texture as an (H, W, 3) float64 array in [-1, 1].

    Args:
        kind: stripes, checkerboard, hexgrid or colored_noise
        size: edge length or (height, width) in pixels
        period: full cycle length in pixels
        angle: stripe direction in degrees; 0 varies intensity along rows
        seed: random seed for colored_noise
        sigma: Gaussian correlation length of colored_noise in pixels
    """
    kind = SynthKind(kind)
    if isinstance(size, int):
        size = (size, size)
    if kind != SynthKind.COLORED_NOISE and period < 2:
        raise ValidationError(f"period must be at least 2 pixels, got {period}", field="period")
    rows, cols = _grid(size)
    omega = 2.0 * math.pi / period

    if kind == SynthKind.STRIPES:
        theta = math.radians(angle)
        phase = omega * (rows * math.cos(theta) + cols * math.sin(theta))
        return _to_rgb(np.cos(phase))

    if kind == SynthKind.CHECKERBOARD:
        # half-pixel offset keeps the sine product away from zero
        product = np.sin(omega * (rows + 0.5)) * np.sin(omega * (cols + 0.5))
        return _to_rgb(np.where(product >= 0, 1.0, -1.0))

    if kind == SynthKind.HEXGRID:
        total = np.zeros(size, dtype=np.float64)
        for degrees in (0.0, 60.0, 120.0):
            theta = math.radians(degrees)
            total += np.cos(omega * (rows * math.cos(theta) + cols * math.sin(theta)))
        # sum of three cosines lies in [-1.5, 3]
        return _to_rgb((total + 1.5) / 4.5 * 2.0 - 1.0)

    rng = np.random.default_rng(seed)
    white = rng.standard_normal((*size, 3))
    smooth = ndimage.gaussian_filter(white, sigma=(sigma, sigma, 0), mode="wrap")
    smooth -= smooth.mean(axis=(0, 1), keepdims=True)
    return smooth / np.abs(smooth).max()


def write_fixture(
    kind: SynthKind | str,
    size: int | tuple[int, int],
    path: str | Path,
    **params: float,
) -> Path:
    """Render a synthetic texture and write it as an 8-bit PNG."""
    path = Path(path)
    image = synth_texture(kind, size, **params)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(encode_image(image)).save(path, format="PNG")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write fixture {path}: {exc}") from exc
    return path
