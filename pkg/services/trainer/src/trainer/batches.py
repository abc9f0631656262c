"""Noise minibatches for training."""

from __future__ import annotations

from typing import Optional

import torch

from shared.exceptions import ValidationError
from shared.models.noise import NoiseSpec
from shared.models.render import GlobalMode
from shared.noise import (
    NoiseTensor,
    WaveNumberMLP,
    assemble_noise,
    build_global,
    build_local,
    build_periodic_field,
    sample_phases,
)


def make_training_batch(
    spec: NoiseSpec,
    mlp: Optional[WaveNumberMLP],
    batch: int,
    generator: torch.Generator,
    *,
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
) -> NoiseTensor:
    """
    Draw a ``(batch, L, M, d)`` noise tensor for one optimizer step.

    Every element gets its own local field, its own ``z^g`` broadcast over
    space and its own phases. Wave numbers come from ``mlp(z^g)`` without
    detaching, so the generator loss reaches the MLP parameters.
    """
    if batch < 1:
        raise ValidationError("batch must be at least 1", field="batch")
    if spec.d_p > 0 and mlp is None:
        raise ValidationError("periodic channels need a wave-number MLP", field="mlp")

    local = build_local(spec, generator, (batch,), dtype=dtype, device=device)

    global_field = None
    z_g = torch.zeros((batch, 0), dtype=dtype, device=device)
    if spec.d_g > 0:
        global_field = build_global(
            spec, GlobalMode.BROADCAST, generator, batch_shape=(batch,), dtype=dtype, device=device
        )
        z_g = global_field.vectors

    periodic_field = None
    if spec.d_p > 0:
        K = mlp(z_g)
        phases = sample_phases(spec.d_p, generator, (batch,), dtype=dtype, device=device)
        periodic_field = build_periodic_field(K, phases, spec.L, spec.M)

    return assemble_noise(spec, local, global_field, periodic_field)
