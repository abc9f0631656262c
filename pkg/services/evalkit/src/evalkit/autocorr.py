"""Autocorrelation maps and periodicity peaks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from scipy import ndimage

from shared.exceptions import ValidationError, ZeroVarianceError

DEFAULT_THRESHOLD = 0.3


@dataclass
class AutocorrMap:
    """Normalized autocorrelation over lags ``-max_lag..max_lag`` on both axes.

    ``values[max_lag + dy, max_lag + dx]`` holds the lag ``(dy, dx)``.
    """

    values: np.ndarray
    max_lag: int

    def at(self, dy: int, dx: int) -> float:
        return float(self.values[self.max_lag + dy, self.max_lag + dx])


def as_image_array(image: np.ndarray | torch.Tensor) -> np.ndarray:
    """(H, W), (H, W, C) or channels-first (C, H, W) tensor -> float64 (H, W, C)."""
    if isinstance(image, torch.Tensor):
        image = image.detach().cpu()
        if image.dim() == 3 and image.shape[0] in (1, 3) and image.shape[-1] not in (1, 3):
            image = image.permute(1, 2, 0)
        image = image.numpy()
    array = np.asarray(image, dtype=np.float64)
    if array.ndim == 2:
        array = array[..., None]
    if array.ndim != 3:
        raise ValidationError(f"expected an (H, W[, C]) image, got shape {array.shape}")
    return array


def autocorrelation(image: np.ndarray | torch.Tensor, max_lag: Optional[int] = None) -> AutocorrMap:
    """
    Circular autocorrelation of a mean-subtracted image, averaged over channels.

    Computed through the power spectrum. The map is symmetrized under lag
    negation and divided by its zero-lag value, which is therefore exactly 1.

    Args:
        image: Image array, any intensity range
        max_lag: Largest lag kept; defaults to a quarter of the smaller side

    Raises:
        ValidationError: image not larger than ``2 * max_lag``
        ZeroVarianceError: every channel is constant
    """
    array = as_image_array(image)
    height, width = array.shape[:2]
    if max_lag is None:
        max_lag = min(height, width) // 4
    if max_lag < 1 or min(height, width) <= 2 * max_lag:
        raise ValidationError(
            f"image {height}x{width} must be larger than 2 * max_lag = {2 * max_lag}",
            field="max_lag",
        )

    centered = array - array.mean(axis=(0, 1), keepdims=True)
    energy = (centered**2).sum(axis=(0, 1))
    active = energy > 0.0
    if not active.any():
        raise ZeroVarianceError()

    spectrum = np.fft.rfft2(centered[..., active], axes=(0, 1))
    power = (spectrum * spectrum.conj()).real
    circular = np.fft.irfft2(power, s=(height, width), axes=(0, 1))
    circular = (circular / energy[active]).mean(axis=2)

    lags = np.arange(-max_lag, max_lag + 1)
    window = circular[np.ix_(lags % height, lags % width)]
    window = 0.5 * (window + window[::-1, ::-1])
    window = window / window[max_lag, max_lag]
    return AutocorrMap(values=np.clip(window, -1.0, 1.0), max_lag=max_lag)


def _canonical(dy: int, dx: int) -> bool:
    return dy > 0 or (dy == 0 and dx > 0)


def detect_periodicity_peaks(
    acmap: AutocorrMap, threshold: float = DEFAULT_THRESHOLD
) -> list[tuple[int, int]]:
    """
    Local maxima of the map above ``threshold`` as ``(dy, dx)`` lags.

    The above-threshold region around the origin (the central lobe) is not a
    periodicity and is skipped. Each ``(lag, -lag)`` pair is reported once, in
    the half plane ``dy > 0`` or ``dy == 0, dx > 0``. Peaks are ordered by
    value (rounded to 1e-6), then by lag length.
    """
    # rounding makes plateaus (e.g. along stripes) compare equal
    values = np.round(acmap.values, 9)
    center = acmap.max_lag
    above = values > threshold
    labels, _ = ndimage.label(above)
    central = labels[center, center]
    maxima = (values == ndimage.maximum_filter(values, size=3, mode="nearest")) & above
    if central:
        maxima &= labels != central

    found = []
    for row, col in zip(*np.nonzero(maxima)):
        dy, dx = int(row) - center, int(col) - center
        if _canonical(dy, dx):
            found.append((-round(float(values[row, col]), 6), float(np.hypot(dy, dx)), (dy, dx)))
    found.sort()
    return [lag for _, _, lag in found]
