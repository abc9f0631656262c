"""Locality and shift-equivariance probes of a generator."""

from __future__ import annotations

import math
from typing import Optional

import torch

from sampler.assembly import plan_noise
from sampler.chunked import render_noise
from sampler.operations import ModelSource, resolve_models
from shared.exceptions import ValidationError
from shared.models.network import NetSpec
from shared.models.records import LocalityBox
from shared.models.render import RenderPlan
from shared.networks import Generator, receptive_field, upsample_factor
from shared.utils.seeding import make_generator


def influence_window(spec: NetSpec, index: int) -> tuple[int, int]:
    """Pixel range (inclusive) along one axis that noise cell ``index`` can change."""
    low = high = index
    pad = spec.kernel // 2
    for _ in range(spec.depth):
        low = 2 * low - pad
        high = 2 * high - pad + spec.kernel - 1
    return low, high


def _bounding_box(changed: torch.Tensor) -> LocalityBox:
    if not bool(changed.any()):
        return LocalityBox(empty=True)
    rows = torch.nonzero(changed.any(dim=1)).flatten()
    cols = torch.nonzero(changed.any(dim=0)).flatten()
    return LocalityBox(
        empty=False,
        top=int(rows[0]),
        left=int(cols[0]),
        bottom=int(rows[-1]),
        right=int(cols[-1]),
    )


def locality_probe(
    source: ModelSource,
    position: Optional[tuple[int, int]] = None,
    *,
    magnitude: float = 1.0,
    extent: Optional[int] = None,
    seed: int = 0,
) -> LocalityBox:
    """
    Bounding box of pixels changed by perturbing the local noise at one position.

    The local channels of ``Z[position]`` (all channels when ``d_l = 0``) get
    a random offset scaled by ``magnitude``; every pixel whose value differs
    at all is inside the box.

    Args:
        source: Model to probe
        position: Noise cell ``(lambda, mu)``; defaults to the center
        magnitude: Perturbation scale; 0 gives an empty box
        extent: Square noise extent; defaults to one receptive field plus margins
        seed: Seed of the base noise and of the perturbation
    """
    bundle = resolve_models(source)
    spec = bundle.net_spec
    if extent is None:
        extent = 2 * math.ceil(receptive_field(spec) / upsample_factor(spec)) + 3
    if position is None:
        position = (extent // 2, extent // 2)
    row, col = position
    if not (0 <= row < extent and 0 <= col < extent):
        raise ValidationError(f"position {position} outside the {extent}x{extent} noise grid")

    base = plan_noise(bundle, RenderPlan(L_out=extent, M_out=extent, seed=seed)).values
    channels = slice(0, bundle.noise_spec.d_l) if bundle.noise_spec.d_l else slice(None)
    width = base[row, col, channels].numel()
    offset = torch.rand(width, generator=make_generator(seed, "perturb"), dtype=torch.float64)
    perturbed = base.clone()
    perturbed[row, col, channels] += (magnitude * (2.0 * offset - 1.0)).to(base.dtype)

    before, _ = render_noise(bundle.generator, base, device=bundle.device)
    after, _ = render_noise(bundle.generator, perturbed, device=bundle.device)
    changed = (after - before).abs().amax(dim=0) > 0
    return _bounding_box(changed)


def shift_equivariance_probe(generator: Generator, noise: torch.Tensor) -> float:
    """
    Max abs difference between G(Z shifted one unit in lambda) and G(Z) shifted 2^depth pixels.

    Both renders are compared on the interior only, excluding a border of one
    receptive field where zero padding differs.
    """
    spec = generator.spec
    factor = upsample_factor(spec)
    border = receptive_field(spec)
    if noise.dim() != 3 or noise.shape[0] < 2:
        raise ValidationError("noise must be (L, M, d) with L >= 2")
    original, _ = render_noise(generator, noise[:-1])
    shifted, _ = render_noise(generator, noise[1:])
    height, width = original.shape[-2:]
    if height - factor - 2 * border <= 0 or width - 2 * border <= 0:
        raise ValidationError("noise extent too small to leave an interior", field="noise")
    reference = original[:, factor + border : height - border, border : width - border]
    moved = shifted[:, border : height - factor - border, border : width - border]
    return float((reference - moved).abs().max())
