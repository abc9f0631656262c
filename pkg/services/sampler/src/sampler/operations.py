"""Render operations on top of plans, noise assembly and the chunked renderer."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import torch

from sampler.assembly import draw_global_vectors, plan_noise
from sampler.chunked import render_noise
from shared import metrics
from shared.checkpoint import Checkpoint, ModelBundle, load_checkpoint, load_models
from shared.exceptions import ValidationError
from shared.models.records import RenderStats
from shared.models.render import GlobalMode, PeriodicSource, RenderPlan
from shared.noise import NoiseTensor
from shared.settings import get_runtime_settings
from shared.utils.logger import setup_logger

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)

ModelSource = ModelBundle | Checkpoint | str | Path
_SEQUENCES = (list, tuple, np.ndarray, torch.Tensor)


class DisentangleMode(str, Enum):
    """Which of the global / periodic parts varies across the quilt."""

    VARY_G_FIX_P = "vary_g_fix_p"
    FIX_G_VARY_P = "fix_g_vary_p"
    VARY_BOTH = "vary_both"


@dataclass
class RenderResult:
    """Rendered image with the noise and plan that produced it."""

    image: torch.Tensor
    noise: NoiseTensor
    plan: RenderPlan
    stats: RenderStats

    def to_hwc(self) -> np.ndarray:
        """Image as an (H, W, 3) float array in [-1, 1]."""
        return self.image.permute(1, 2, 0).numpy()


def resolve_models(
    source: ModelSource,
    *,
    dtype: Optional[torch.dtype] = None,
    device: Optional[torch.device | str] = None,
) -> ModelBundle:
    """Accept a loaded bundle, a checkpoint, or a checkpoint path."""
    if isinstance(source, ModelBundle):
        return source
    if not isinstance(source, Checkpoint):
        source = load_checkpoint(source)
    return load_models(
        source,
        dtype=dtype or settings.torch_dtype,
        device=device or settings.torch_device,
    )


def _vectors(values: Any) -> Optional[list]:
    if values is None:
        return None
    if isinstance(values, (torch.Tensor, np.ndarray)):
        return values.tolist()
    return [[float(x) for x in v] if isinstance(v, _SEQUENCES) else float(v) for v in values]


def render(source: ModelSource, plan: RenderPlan, *, operation: str = "render") -> RenderResult:
    """Render the image a plan describes; chunked output equals the single-pass one."""
    bundle = resolve_models(source)
    noise = plan_noise(bundle, plan)
    image, stats = render_noise(
        bundle.generator,
        noise.values,
        chunk=plan.chunk,
        tileable=plan.tileable,
        device=bundle.device,
    )
    metrics.render_duration_seconds.labels(operation=operation).observe(stats.seconds)
    metrics.rendered_pixels_total.labels(operation=operation).inc(image.shape[-2] * image.shape[-1])
    logger.info(
        "%s: %dx%d noise -> %dx%d pixels in %.2fs (%d chunk(s), global=%s, periodic=%s)",
        operation,
        plan.L_out,
        plan.M_out,
        image.shape[-2],
        image.shape[-1],
        stats.seconds,
        stats.chunks,
        plan.global_mode.value,
        plan.periodic_source.value,
    )
    return RenderResult(image=image, noise=noise, plan=plan, stats=stats)


def render_quilt(
    source: ModelSource,
    tiles_y: int,
    tiles_x: int,
    delta: int,
    seed: int = 0,
    *,
    chunk: int = 0,
) -> RenderResult:
    """Patchwork of ``tiles_y x tiles_x`` textures, each with its own z^g on a Δ x Δ tile."""
    if delta < 1 or tiles_y < 1 or tiles_x < 1:
        raise ValidationError("tiles and delta must be at least 1", field="delta")
    plan = RenderPlan(
        L_out=tiles_y * delta,
        M_out=tiles_x * delta,
        global_mode=GlobalMode.QUILT,
        delta=delta,
        seed=seed,
        chunk=chunk,
    )
    return render(source, plan, operation="quilt")


def render_morph(
    source: ModelSource,
    corner_zg: Optional[Sequence[Sequence[float]]],
    L_out: int,
    M_out: int,
    seed: int = 0,
    *,
    chunk: int = 0,
) -> RenderResult:
    """Bilinear morph between 4 corner z^g: top-left, top-right, bottom-left, bottom-right."""
    bundle = resolve_models(source)
    if bundle.noise_spec.d_g == 0:
        raise ValidationError("morphing needs global channels (d_g = 0)", field="d_g")
    corners = _vectors(corner_zg)
    if corners is None:
        corners = draw_global_vectors(bundle.noise_spec, 4, seed, "corners")
    plan = RenderPlan(
        L_out=L_out,
        M_out=M_out,
        global_mode=GlobalMode.BILINEAR,
        corners=corners,
        seed=seed,
        chunk=chunk,
    )
    return render(bundle, plan, operation="morph")


def render_linear_morph(
    source: ModelSource,
    left_zg: Optional[Sequence[float]],
    right_zg: Optional[Sequence[float]],
    L_out: int,
    M_out: int,
    *,
    fix_periodic: bool = False,
    periodic_z_g: Optional[Sequence[float]] = None,
    seed: int = 0,
    chunk: int = 0,
) -> RenderResult:
    """
    Horizontal morph from ``left_zg`` to ``right_zg``.

    With ``fix_periodic`` the wave numbers of ``periodic_z_g`` (default: the
    midpoint of the endpoints) apply everywhere, keeping the periodic
    structure aligned while the appearance changes.
    """
    bundle = resolve_models(source)
    spec = bundle.noise_spec
    if spec.d_g == 0:
        raise ValidationError("morphing needs global channels (d_g = 0)", field="d_g")
    drawn = draw_global_vectors(spec, 2, seed, "endpoints")
    left = _vectors(left_zg) or drawn[0]
    right = _vectors(right_zg) or drawn[1]
    plan_kwargs: dict[str, Any] = {}
    if fix_periodic:
        anchor = _vectors(periodic_z_g)
        if anchor is None:
            anchor = [(a + b) / 2.0 for a, b in zip(left, right)]
        plan_kwargs = {"periodic_source": PeriodicSource.OVERRIDDEN, "periodic_z_g": anchor}
    plan = RenderPlan(
        L_out=L_out,
        M_out=M_out,
        global_mode=GlobalMode.LINEAR,
        corners=[left, right],
        seed=seed,
        chunk=chunk,
        **plan_kwargs,
    )
    return render(bundle, plan, operation="linear_morph")


def render_disentangled(
    source: ModelSource,
    mode: DisentangleMode | str,
    tiles_y: int,
    tiles_x: int,
    delta: int,
    z_hat: Optional[Sequence[float]] = None,
    seed: int = 0,
    *,
    chunk: int = 0,
) -> RenderResult:
    """
    Quilt in which only the global part, only the periodic part, or both vary per tile.

    - vary_g_fix_p: quilted Z^g, wave numbers of ``z_hat`` everywhere
    - fix_g_vary_p: ``z_hat`` broadcast as Z^g, wave numbers from the quilt
    - vary_both: ordinary quilt

    The local part is the same in all three.
    """
    mode = DisentangleMode(mode)
    bundle = resolve_models(source)
    spec = bundle.noise_spec
    if spec.d_g < 1 or spec.d_p < 1:
        raise ValidationError(
            f"disentangling needs d_g >= 1 and d_p >= 1, model has d_g={spec.d_g}, d_p={spec.d_p}",
            field="mode",
        )
    if delta < 1 or tiles_y < 1 or tiles_x < 1:
        raise ValidationError("tiles and delta must be at least 1", field="delta")
    anchor = _vectors(z_hat) or draw_global_vectors(spec, 1, seed, "z_hat")[0]
    base = {
        "L_out": tiles_y * delta,
        "M_out": tiles_x * delta,
        "delta": delta,
        "seed": seed,
        "chunk": chunk,
    }
    if mode == DisentangleMode.VARY_G_FIX_P:
        plan = RenderPlan(
            **base,
            global_mode=GlobalMode.QUILT,
            periodic_source=PeriodicSource.OVERRIDDEN,
            periodic_z_g=anchor,
        )
    elif mode == DisentangleMode.FIX_G_VARY_P:
        plan = RenderPlan(
            **base,
            global_mode=GlobalMode.BROADCAST,
            z_g=anchor,
            periodic_source=PeriodicSource.QUILTED,
        )
    else:
        plan = RenderPlan(**base, global_mode=GlobalMode.QUILT)
    return render(bundle, plan, operation=f"disentangle_{mode.value}")


def render_tileable(
    source: ModelSource,
    L_out: int,
    M_out: int,
    seed: int = 0,
    *,
    z_g: Optional[Sequence[float]] = None,
    chunk: int = 0,
) -> RenderResult:
    """Image whose opposite edges continue each other when tiled."""
    plan = RenderPlan(
        L_out=L_out,
        M_out=M_out,
        global_mode=GlobalMode.BROADCAST,
        z_g=_vectors(z_g),
        seed=seed,
        chunk=chunk,
        tileable=True,
    )
    return render(source, plan, operation="tile")
