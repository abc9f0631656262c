"""Learned wave numbers against the periodicity of a rendered image."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
import torch

from evalkit.autocorr import DEFAULT_THRESHOLD, autocorrelation, detect_periodicity_peaks
from sampler.operations import ModelSource, resolve_models
from shared.exceptions import ValidationError
from shared.models.records import ConsistencyReport, PeriodMatch
from shared.noise import mlp_wavenumbers, wrap_wavenumbers

MIN_WAVENUMBER = 1e-6


def period_vector(wavevector: Sequence[float], depth: int) -> Optional[tuple[float, float]]:
    """Pixel period vector ``2 pi k / |k|^2 * 2^depth``; None for a (near) zero wave vector."""
    k = np.asarray(wavevector, dtype=np.float64)
    norm_sq = float(k @ k)
    if norm_sq < MIN_WAVENUMBER**2:
        return None
    period = 2.0 * math.pi * k / norm_sq * 2**depth
    return float(period[0]), float(period[1])


def _match(
    channel: int,
    wavevector: tuple[float, float],
    period: Optional[tuple[float, float]],
    peaks: list[tuple[int, int]],
) -> PeriodMatch:
    if period is None or not peaks:
        return PeriodMatch(channel=channel, wavevector=wavevector, learned_period=period)
    p = np.asarray(period)
    best = None
    for peak in peaks:
        q = np.asarray(peak, dtype=np.float64)
        # a period vector and its negation describe the same lattice
        for candidate in (q, -q):
            error = float(np.linalg.norm(candidate - p))
            if best is None or error < best[0]:
                best = (error, candidate, peak)
    error, candidate, peak = best
    length = float(np.linalg.norm(p))
    return PeriodMatch(
        channel=channel,
        wavevector=wavevector,
        learned_period=period,
        matched_peak=peak,
        abs_error_px=error,
        relative_error=error / length,
        axis_relative_error=(
            abs(float(candidate[0]) - period[0]) / length,
            abs(float(candidate[1]) - period[1]) / length,
        ),
    )


def wavenumber_consistency(
    source: ModelSource,
    z_g: Optional[Sequence[float]],
    image: np.ndarray | torch.Tensor,
    *,
    max_lag: Optional[int] = None,
    threshold: float = DEFAULT_THRESHOLD,
    tolerance: float = 0.15,
) -> ConsistencyReport:
    """
    Compare the period vectors of ``K = mlp(z_g)`` with autocorrelation peaks of ``image``.

    Each learned period vector is matched to the nearest detected peak (up to
    sign). The report is "consistent" when the best channel is within
    ``tolerance`` relative error, "aperiodic" when the model has no periodic
    channels or the image shows no peaks.
    """
    bundle = resolve_models(source)
    spec = bundle.noise_spec
    depth = bundle.net_spec.depth
    if spec.d_p == 0 or bundle.mlp is None:
        return ConsistencyReport(status="aperiodic", depth=depth, tolerance=tolerance)
    if spec.d_g > 0 and z_g is None:
        raise ValidationError("z_g is required for a model with global channels", field="z_g")
    vector = torch.zeros(0) if spec.d_g == 0 else torch.as_tensor(z_g, dtype=torch.float64)
    K = wrap_wavenumbers(mlp_wavenumbers(bundle.mlp, vector).detach().cpu().double())

    acmap = autocorrelation(image, max_lag)
    peaks = detect_periodicity_peaks(acmap, threshold)
    matches = []
    for channel in range(spec.d_p):
        wavevector = (float(K[0, channel]), float(K[1, channel]))
        matches.append(_match(channel, wavevector, period_vector(wavevector, depth), peaks))
    errors = [m.relative_error for m in matches if m.relative_error is not None]
    if not peaks or not errors:
        return ConsistencyReport(
            status="aperiodic", depth=depth, tolerance=tolerance, peaks=peaks, matches=matches
        )
    best = min(errors)
    return ConsistencyReport(
        status="consistent" if best <= tolerance else "inconsistent",
        depth=depth,
        tolerance=tolerance,
        peaks=peaks,
        matches=matches,
        max_relative_error=max(errors),
        min_relative_error=best,
    )

