"""Noise tensors for render plans."""

from __future__ import annotations

from typing import Optional

import torch

from shared.checkpoint import ModelBundle
from shared.exceptions import ValidationError
from shared.models.noise import NoiseSpec
from shared.models.render import GlobalMode, PeriodicSource, RenderPlan
from shared.noise import (
    GlobalField,
    NoiseTensor,
    assemble_noise,
    build_global,
    build_local,
    build_periodic_field,
    mlp_wavenumbers,
    sample_phases,
    snap_wavenumbers,
)
from shared.utils.seeding import make_generator


def draw_global_vectors(spec: NoiseSpec, count: int, seed: int, stream: str) -> list[list[float]]:
    """Draw ``count`` z^g vectors from the uniform prior (e.g. morph corners)."""
    if spec.d_g == 0:
        raise ValidationError("the model has no global channels (d_g = 0)", field="d_g")
    generator = make_generator(seed, stream)
    draw = torch.rand((count, spec.d_g), generator=generator, dtype=torch.float64)
    vectors = spec.prior_low + (spec.prior_high - spec.prior_low) * draw
    return vectors.tolist()


def _wavenumbers(
    bundle: ModelBundle,
    plan: RenderPlan,
    spec: NoiseSpec,
    global_field: Optional[GlobalField],
) -> torch.Tensor:
    source = plan.periodic_source
    if source == PeriodicSource.EXPLICIT:
        K = torch.as_tensor(plan.wavenumbers, dtype=bundle.dtype)
        if tuple(K.shape) != (2, spec.d_p):
            raise ValidationError(
                f"explicit wave numbers have shape {tuple(K.shape)}, expected (2, {spec.d_p})",
                field="wavenumbers",
            )
        return K

    mlp = bundle.mlp
    if source == PeriodicSource.OVERRIDDEN:
        if plan.periodic_z_g is None:
            raise ValidationError(
                "overridden periodic source needs periodic_z_g", field="periodic_z_g"
            )
        return mlp_wavenumbers(mlp, plan.periodic_z_g).cpu()

    if source == PeriodicSource.QUILTED:
        if spec.d_g == 0:
            raise ValidationError("quilted wave numbers need global channels", field="d_g")
        quilt = build_global(
            spec,
            GlobalMode.QUILT,
            make_generator(plan.seed, "global"),
            delta=plan.delta,
            dtype=bundle.dtype,
        )
        return mlp_wavenumbers(mlp, quilt.values).cpu()

    if global_field is None:
        return mlp_wavenumbers(mlp, torch.zeros(0)).cpu()
    if global_field.construction == GlobalMode.BROADCAST:
        return mlp_wavenumbers(mlp, global_field.vectors).cpu()
    return mlp_wavenumbers(mlp, global_field.values).cpu()


def plan_noise(bundle: ModelBundle, plan: RenderPlan) -> NoiseTensor:
    """
    Build the ``(L_out, M_out, d)`` noise tensor of a plan on CPU.

    Local, global and phase draws use separate streams derived from
    ``plan.seed``, so variants of one plan share the parts they do not change.
    """
    spec = bundle.noise_spec.with_extent(plan.L_out, plan.M_out)
    dtype = bundle.dtype

    local = build_local(spec, make_generator(plan.seed, "local"), dtype=dtype)

    global_field = None
    if spec.d_g > 0:
        global_field = build_global(
            spec,
            plan.global_mode,
            make_generator(plan.seed, "global"),
            z_g=plan.z_g,
            delta=plan.delta,
            corners=plan.corners,
            values=plan.global_values,
            dtype=dtype,
        )
    elif plan.global_mode != GlobalMode.BROADCAST or plan.z_g:
        raise ValidationError(
            f"{plan.global_mode.value} global layout needs global channels, model has d_g = 0",
            field="global_mode",
        )

    periodic_field = None
    if spec.d_p > 0:
        K = _wavenumbers(bundle, plan, spec, global_field)
        if plan.tileable:
            K = snap_wavenumbers(K, plan.L_out, plan.M_out)
        phases = sample_phases(spec.d_p, make_generator(plan.seed, "phase"), dtype=dtype)
        periodic_field = build_periodic_field(K.to(dtype), phases, plan.L_out, plan.M_out)
    elif plan.periodic_source != PeriodicSource.COUPLED:
        raise ValidationError(
            f"{plan.periodic_source.value} periodic source needs periodic channels, "
            "model has d_p = 0",
            field="periodic_source",
        )

    return assemble_noise(spec, local, global_field, periodic_field)
