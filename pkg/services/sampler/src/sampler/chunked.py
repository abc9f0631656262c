"""Overlap-and-crop generator rollout."""

from __future__ import annotations

import copy
import time
from typing import Optional

import torch

from shared.exceptions import ChunkTooSmallError, ValidationError
from shared.models.records import RenderStats
from shared.networks import Generator, min_chunk_extent, noise_margin, upsample_factor

COMPUTE_DTYPE = torch.float64


def _forward(generator: Generator, window: torch.Tensor, device: torch.device) -> torch.Tensor:
    batch = window.permute(2, 0, 1).unsqueeze(0).to(device=device, dtype=COMPUTE_DTYPE)
    with torch.no_grad():
        return generator(batch)[0]


def _compute_copy(generator: Generator, device: torch.device) -> Generator:
    """Float64 instance of ``generator`` on ``device``; every window of a render goes through it."""
    param = next(generator.parameters())
    if param.dtype == COMPUTE_DTYPE and param.device == device:
        return generator
    return copy.deepcopy(generator).to(device=device, dtype=COMPUTE_DTYPE).eval()


def wrap_pad(noise: torch.Tensor, margin: int) -> torch.Tensor:
    """Circularly extend an ``(L, M, d)`` tensor by ``margin`` cells on every side."""
    L, M = noise.shape[:2]
    rows = torch.arange(-margin, L + margin) % L
    cols = torch.arange(-margin, M + margin) % M
    return noise[rows][:, cols]


def _rollout(
    generator: Generator,
    noise: torch.Tensor,
    chunk: int,
    device: torch.device,
    dtype: torch.dtype,
) -> tuple[torch.Tensor, int, int]:
    spec = generator.spec
    factor = upsample_factor(spec)
    margin = noise_margin(spec)
    L, M = noise.shape[:2]

    if chunk == 0 or (chunk >= L and chunk >= M):
        return _forward(generator, noise, device).to(dtype).cpu(), 1, L * M

    out = torch.empty((spec.image_channels, L * factor, M * factor), dtype=dtype)
    count = 0
    peak_cells = 0
    for y0 in range(0, L, chunk):
        y1 = min(y0 + chunk, L)
        wy0, wy1 = max(0, y0 - margin), min(L, y1 + margin)
        for x0 in range(0, M, chunk):
            x1 = min(x0 + chunk, M)
            wx0, wx1 = max(0, x0 - margin), min(M, x1 + margin)
            rendered = _forward(generator, noise[wy0:wy1, wx0:wx1], device)
            top, left = (y0 - wy0) * factor, (x0 - wx0) * factor
            out[:, y0 * factor : y1 * factor, x0 * factor : x1 * factor] = (
                rendered[:, top : top + (y1 - y0) * factor, left : left + (x1 - x0) * factor]
                .to(dtype)
                .cpu()
            )
            count += 1
            peak_cells = max(peak_cells, (wy1 - wy0) * (wx1 - wx0))
    return out, count, peak_cells


def render_noise(
    generator: Generator,
    noise: torch.Tensor,
    *,
    chunk: int = 0,
    tileable: bool = False,
    device: Optional[torch.device] = None,
) -> tuple[torch.Tensor, RenderStats]:
    """
    Roll the generator out over an ``(L, M, d)`` channels-last noise tensor.

    With ``chunk > 0`` the noise is split into ``chunk x chunk`` cells. Each
    cell is rendered from a window extended by ``noise_margin`` units on the
    sides that face other cells and clipped at the image border, then cropped
    back to the cell. Only one window is on the device at a time; the output
    image is assembled on CPU.

    Windows are evaluated in float64 and cast to the generator's dtype after
    cropping, so a float32 image is byte-identical for every chunk size,
    including the single pass. On CUDA the allocator peak above the starting
    allocation is reported as ``peak_device_bytes``.

    Returns:
        ``(3, 2^D L, 2^D M)`` CPU image and working-set statistics
    """
    started = time.perf_counter()
    spec = generator.spec
    if noise.dim() != 3 or noise.shape[-1] != spec.noise_channels:
        raise ValidationError(
            f"noise has shape {tuple(noise.shape)}, expected (L, M, {spec.noise_channels})"
        )
    if chunk and chunk < min_chunk_extent(spec):
        raise ChunkTooSmallError(chunk, min_chunk_extent(spec))
    factor = upsample_factor(spec)
    margin = noise_margin(spec)
    param = next(generator.parameters())
    device = device or param.device
    dtype = param.dtype
    compute = _compute_copy(generator, device)

    tracking = device.type == "cuda"
    if tracking:
        torch.cuda.synchronize(device)
        baseline = torch.cuda.memory_allocated(device)
        torch.cuda.reset_peak_memory_stats(device)

    L, M = noise.shape[:2]
    if tileable:
        padded, count, peak_cells = _rollout(compute, wrap_pad(noise, margin), chunk, device, dtype)
        crop = margin * factor
        image = padded[:, crop : crop + L * factor, crop : crop + M * factor].contiguous()
    else:
        image, count, peak_cells = _rollout(compute, noise, chunk, device, dtype)

    peak_bytes = None
    if tracking:
        torch.cuda.synchronize(device)
        peak_bytes = torch.cuda.max_memory_allocated(device) - baseline
    stats = RenderStats(
        chunks=count,
        peak_chunk_cells=peak_cells,
        peak_chunk_pixels=peak_cells * factor * factor,
        peak_device_bytes=peak_bytes,
        seconds=time.perf_counter() - started,
    )
    return image, stats
