"""Structured noise tensors: local, global and periodic parts.

Spatial arrays use the channels-last layout ``(*batch, L, M, C)``; ``lambda``
indexes rows (L) and ``mu`` indexes columns (M), both 0-based. All random
draws happen on CPU in float64 from an explicit ``torch.Generator`` and are
then cast, so a given seed produces the same field on every device and dtype.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import torch
from torch import nn

from shared.exceptions import ValidationError
from shared.models.noise import NoiseSpec
from shared.models.render import GlobalMode

TWO_PI = 2.0 * math.pi
INIT_STD = 0.02


def _draw_uniform(
    shape: Sequence[int],
    generator: torch.Generator,
    low: float,
    high: float,
    dtype: torch.dtype,
    device: torch.device | str,
) -> torch.Tensor:
    values = torch.rand(tuple(shape), generator=generator, dtype=torch.float64)
    values = low + (high - low) * values
    return values.to(device=device, dtype=dtype)


def _as_tensor(values: Any, dtype: torch.dtype, device: torch.device | str) -> torch.Tensor:
    if isinstance(values, torch.Tensor):
        return values.to(device=device, dtype=dtype)
    return torch.as_tensor(values, dtype=dtype, device=device)


# --- local part ---
def build_local(
    spec: NoiseSpec,
    generator: torch.Generator,
    batch_shape: Sequence[int] = (),
    *,
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
) -> torch.Tensor:
    """Draw i.i.d. uniform local noise of shape ``(*batch, L, M, d_l)``."""
    shape = (*batch_shape, spec.L, spec.M, spec.d_l)
    return _draw_uniform(shape, generator, spec.prior_low, spec.prior_high, dtype, device)


# --- global part ---
@dataclass
class GlobalField:
    """Global noise laid out over space together with how it was built."""

    values: torch.Tensor
    construction: GlobalMode
    delta: Optional[int] = None
    vectors: Optional[torch.Tensor] = None


def _interp_weights(n: int, dtype: torch.dtype, device: torch.device | str) -> torch.Tensor:
    if n == 1:
        return torch.zeros(1, dtype=dtype, device=device)
    return torch.arange(n, dtype=dtype, device=device) / (n - 1)


def build_global(
    spec: NoiseSpec,
    mode: GlobalMode | str,
    generator: Optional[torch.Generator] = None,
    *,
    z_g: Any = None,
    delta: Optional[int] = None,
    corners: Any = None,
    values: Any = None,
    batch_shape: Sequence[int] = (),
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
) -> GlobalField:
    """
    Build the global part Z^g of shape ``(*batch, L, M, d_g)``.

    Args:
        spec: Noise layout
        mode: broadcast, quilt, bilinear, linear or explicit
        generator: Source of prior draws for vectors not supplied explicitly
        z_g: Broadcast vector (``(*batch, d_g)``); drawn when omitted
        delta: Quilt tile edge in noise units
        corners: Bilinear corners ``(4, d_g)`` in order top-left, top-right,
            bottom-left, bottom-right, or linear endpoints ``(2, d_g)`` left, right
        values: Explicit ``(L, M, d_g)`` field for explicit mode
        batch_shape: Leading batch dimensions for drawn vectors

    Returns:
        GlobalField satisfying the invariant of the chosen mode
    """
    mode = GlobalMode(mode)
    if spec.d_g == 0:
        raise ValidationError("global part is empty (d_g = 0); skip it instead", field="d_g")
    L, M, d_g = spec.L, spec.M, spec.d_g

    def draw(*shape: int) -> torch.Tensor:
        if generator is None:
            raise ValidationError(f"{mode.value} mode needs a generator or explicit vectors")
        return _draw_uniform(
            (*batch_shape, *shape), generator, spec.prior_low, spec.prior_high, dtype, device
        )

    if mode == GlobalMode.BROADCAST:
        if z_g is None:
            vector = draw(1, 1, d_g)
        else:
            vector = _as_tensor(z_g, dtype, device)[..., None, None, :]
        if vector.shape[-1] != d_g:
            raise ValidationError(f"z_g has length {vector.shape[-1]}, expected {d_g}", field="z_g")
        field_values = vector.expand(*vector.shape[:-3], L, M, d_g).contiguous()
        return GlobalField(field_values, mode, vectors=vector[..., 0, 0, :])

    if mode == GlobalMode.QUILT:
        if delta is None or delta < 1:
            raise ValidationError("quilt mode requires delta >= 1", field="delta")
        if delta > min(L, M):
            raise ValidationError(
                f"delta {delta} exceeds the smaller spatial extent {min(L, M)}", field="delta"
            )
        tiles_y, tiles_x = math.ceil(L / delta), math.ceil(M / delta)
        tiles = draw(tiles_y, tiles_x, d_g)
        field_values = tiles.repeat_interleave(delta, dim=-3).repeat_interleave(delta, dim=-2)
        field_values = field_values[..., :L, :M, :].contiguous()
        return GlobalField(field_values, mode, delta=delta, vectors=tiles)

    if mode == GlobalMode.BILINEAR:
        anchors = draw(4, d_g) if corners is None else _as_tensor(corners, dtype, device)
        if anchors.shape[-2:] != (4, d_g):
            raise ValidationError(f"bilinear mode takes 4 corner vectors of length {d_g}")
        a = _interp_weights(L, dtype, device)[:, None, None]
        b = _interp_weights(M, dtype, device)[None, :, None]
        tl, tr, bl, br = (anchors[..., i, None, None, :] for i in range(4))
        top = torch.lerp(tl, tr, b)
        bottom = torch.lerp(bl, br, b)
        field_values = torch.lerp(top, bottom, a)
        return GlobalField(field_values, mode, vectors=anchors)

    if mode == GlobalMode.LINEAR:
        anchors = draw(2, d_g) if corners is None else _as_tensor(corners, dtype, device)
        if anchors.shape[-2:] != (2, d_g):
            raise ValidationError(f"linear mode takes 2 endpoint vectors of length {d_g}")
        b = _interp_weights(M, dtype, device)[None, :, None]
        left, right = anchors[..., 0, None, None, :], anchors[..., 1, None, None, :]
        field_values = torch.lerp(left, right, b).expand(*anchors.shape[:-2], L, M, d_g)
        return GlobalField(field_values.contiguous(), mode, vectors=anchors)

    if values is None:
        raise ValidationError("explicit mode requires values", field="values")
    field_values = _as_tensor(values, dtype, device)
    if field_values.shape[-3:] != (L, M, d_g):
        raise ValidationError(
            f"explicit global field has shape {tuple(field_values.shape)}, expected (L, M, d_g)"
        )
    return GlobalField(field_values, mode)


# --- wave-number MLP ---
def initial_wavenumber_means(d_p: int) -> torch.Tensor:
    """Evenly spaced initial wave numbers c_i = pi * i / d_p, i = 1..d_p."""
    return torch.arange(1, d_p + 1, dtype=torch.float64) * math.pi / d_p


class WaveNumberMLP(nn.Module):
    """
    One-hidden-layer perceptron mapping a global vector to a 2 x d_p wave-number matrix.

    With ``d_g == 0`` the network degenerates to the two bias vectors.
    """

    def __init__(self, d_g: int, d_p: int, d_h: int = 60):
        super().__init__()
        self.d_g = d_g
        self.d_p = d_p
        self.d_h = d_h
        self.register_buffer("c", initial_wavenumber_means(d_p))
        if d_g > 0:
            self.W = nn.Parameter(torch.zeros(d_h, d_g))
            self.b = nn.Parameter(torch.zeros(d_h))
            self.W1 = nn.Parameter(torch.zeros(d_p, d_h))
            self.W2 = nn.Parameter(torch.zeros(d_p, d_h))
        self.b1 = nn.Parameter(torch.zeros(d_p))
        self.b2 = nn.Parameter(torch.zeros(d_p))

    def forward(self, z_g: torch.Tensor) -> torch.Tensor:
        """Map ``(..., d_g)`` global vectors to ``(..., 2, d_p)`` wave-number matrices."""
        if z_g.shape[-1] != self.d_g:
            raise ValidationError(
                f"z_g has length {z_g.shape[-1]}, expected {self.d_g}", field="z_g"
            )
        lead = z_g.shape[:-1]
        if self.d_g == 0:
            rows = torch.stack([self.b1, self.b2])
            return rows.expand(*lead, 2, self.d_p)
        hidden = torch.relu(z_g @ self.W.T + self.b)
        row1 = hidden @ self.W1.T + self.b1
        row2 = hidden @ self.W2.T + self.b2
        return torch.stack([row1, row2], dim=-2)


def init_wavenumber_mlp(
    spec: NoiseSpec,
    d_h: Optional[int] = None,
    generator: Optional[torch.Generator] = None,
) -> WaveNumberMLP:
    """
    Create a wave-number MLP with N(0, 0.02) weights and N(c, 0.02 c) output biases.

    The standard deviations are elementwise (0.02 and 0.02 * c_i).
    """
    if spec.d_p < 1:
        raise ValidationError("wave-number MLP needs at least one periodic channel", field="d_p")
    mlp = WaveNumberMLP(spec.d_g, spec.d_p, spec.d_h if d_h is None else d_h)
    if generator is None:
        generator = torch.Generator().manual_seed(0)
    with torch.no_grad():
        for name in ("W", "b", "W1", "W2"):
            if hasattr(mlp, name):
                param = getattr(mlp, name)
                draw = torch.randn(param.shape, generator=generator, dtype=torch.float64)
                param.copy_(draw * INIT_STD)
        c = mlp.c
        for param in (mlp.b1, mlp.b2):
            draw = torch.randn(param.shape, generator=generator, dtype=torch.float64)
            param.copy_(c + INIT_STD * c * draw)
    return mlp


def mlp_wavenumbers(mlp: WaveNumberMLP, z_g: Any) -> torch.Tensor:
    """Evaluate K = xi(z_g); input is ignored (but length-checked) when d_g = 0."""
    param = mlp.b1
    z = _as_tensor(z_g, param.dtype, param.device)
    if z.dim() == 0:
        raise ValidationError("z_g must be a vector", field="z_g")
    return mlp(z)


# --- periodic part ---
@dataclass
class PeriodicField:
    """Plane-wave channels with the wave numbers and phases used to build them."""

    values: torch.Tensor
    K: torch.Tensor
    phases: torch.Tensor

    @property
    def spatially_constant(self) -> bool:
        """True when one K matrix applies to every position."""
        return self.K.dim() - self.phases.dim() == 1


def sample_phases(
    d_p: int,
    generator: torch.Generator,
    batch_shape: Sequence[int] = (),
    *,
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
) -> torch.Tensor:
    """Draw i.i.d. phases uniformly from [0, 2 pi)."""
    draw = torch.rand((*batch_shape, d_p), generator=generator, dtype=torch.float64) * TWO_PI
    # rounding can land exactly on 2 pi
    draw = torch.remainder(draw, TWO_PI)
    phases = draw.to(dtype=dtype)
    phases = torch.where(phases >= TWO_PI, torch.zeros_like(phases), phases)
    return phases.to(device=device)


def build_periodic_field(
    K: torch.Tensor,
    phases: torch.Tensor,
    L: int,
    M: int,
    *,
    offset: tuple[int, int] = (0, 0),
) -> PeriodicField:
    """
    Evaluate sin(K[0, i] * lambda + K[1, i] * mu + phi_i) on an L x M grid.

    ``K`` is either ``(*batch, 2, d_p)`` (one matrix for the whole grid) or
    ``(*batch, L, M, 2, d_p)`` (a matrix per position). ``phases`` is
    ``(*batch, d_p)``. ``offset`` shifts the 0-based grid origin, which lets
    chunked and wrapped renders evaluate a sub-window of a larger field.
    Wave numbers outside [-pi, pi] are evaluated as they are (aliasing).
    """
    dtype, device = K.dtype, K.device
    lam = torch.arange(offset[0], offset[0] + L, dtype=dtype, device=device)[:, None, None]
    mu = torch.arange(offset[1], offset[1] + M, dtype=dtype, device=device)[None, :, None]
    extra = K.dim() - phases.dim()
    if extra == 1:
        k_row = K[..., 0, :][..., None, None, :]
        k_col = K[..., 1, :][..., None, None, :]
    elif extra == 3:
        if K.shape[-4:-2] != (L, M):
            raise ValidationError(
                f"wave-number field has spatial shape {tuple(K.shape[-4:-2])}, expected {(L, M)}"
            )
        k_row = K[..., 0, :]
        k_col = K[..., 1, :]
    else:
        raise ValidationError(
            f"K shape {tuple(K.shape)} is incompatible with phases {tuple(phases.shape)}"
        )
    phi = phases.to(dtype)[..., None, None, :]
    values = torch.sin(k_row * lam + k_col * mu + phi)
    return PeriodicField(values, K, phases)


def wrap_wavenumbers(K: torch.Tensor) -> torch.Tensor:
    """Project wave numbers into the Nyquist interval [-pi, pi)."""
    return torch.remainder(K + math.pi, TWO_PI) - math.pi


def snap_wavenumbers(K: torch.Tensor, L: int, M: int) -> torch.Tensor:
    """Snap row / column wave numbers to the nearest multiple of 2 pi / L and 2 pi / M."""
    step = torch.tensor([TWO_PI / L, TWO_PI / M], dtype=K.dtype, device=K.device)[:, None]
    return torch.round(K / step) * step


# --- assembly ---
@dataclass
class NoiseTensor:
    """Assembled ``[local | global | periodic]`` noise with its provenance."""

    values: torch.Tensor
    spec: NoiseSpec
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def local(self) -> torch.Tensor:
        return self.values[..., : self.spec.d_l]

    @property
    def global_part(self) -> torch.Tensor:
        return self.values[..., self.spec.d_l : self.spec.d_l + self.spec.d_g]

    @property
    def periodic(self) -> torch.Tensor:
        return self.values[..., self.spec.d_l + self.spec.d_g :]

    def to_generator_input(self) -> torch.Tensor:
        """Return ``(N, d, L, M)`` channels-first input for the generator."""
        values = self.values if self.values.dim() == 4 else self.values.unsqueeze(0)
        return values.permute(0, 3, 1, 2).contiguous()


def _empty_part(
    reference: torch.Tensor, channels: int, spatial: tuple[int, int]
) -> torch.Tensor:
    lead = reference.shape[:-3]
    return reference.new_zeros((*lead, *spatial, channels))


def assemble_noise(
    spec: NoiseSpec,
    local: Optional[torch.Tensor],
    global_field: Optional[GlobalField | torch.Tensor],
    periodic_field: Optional[PeriodicField | torch.Tensor],
    *,
    check_ranges: bool = True,
) -> NoiseTensor:
    """Concatenate the parts along the channel axis in the fixed order local, global, periodic."""
    provenance: dict[str, Any] = {}
    global_values = global_field
    if isinstance(global_field, GlobalField):
        provenance["global"] = global_field
        global_values = global_field.values
    periodic_values = periodic_field
    if isinstance(periodic_field, PeriodicField):
        provenance["periodic"] = periodic_field
        periodic_values = periodic_field.values

    parts = {"local": local, "global": global_values, "periodic": periodic_values}
    reference = next((part for part in parts.values() if part is not None), None)
    if reference is None:
        raise ValidationError("at least one noise part is required")
    spatial = tuple(reference.shape[-3:-1])

    expected = {"local": spec.d_l, "global": spec.d_g, "periodic": spec.d_p}
    filled = []
    for name, part in parts.items():
        if part is None:
            if expected[name] != 0:
                raise ValidationError(f"{name} part missing but spec has {expected[name]} channels")
            part = _empty_part(reference, 0, spatial)
        if tuple(part.shape[-3:-1]) != spatial or part.shape[:-3] != reference.shape[:-3]:
            raise ValidationError(
                f"{name} part has shape {tuple(part.shape)}, incompatible with "
                f"{tuple(reference.shape[:-1])}"
            )
        if part.shape[-1] != expected[name]:
            raise ValidationError(
                f"{name} part has {part.shape[-1]} channels, spec expects {expected[name]}"
            )
        filled.append(part.to(dtype=reference.dtype))

    if check_ranges:
        local_part, _, periodic_part = filled
        if local_part.numel() and (
            local_part.min() < spec.prior_low or local_part.max() > spec.prior_high
        ):
            raise ValidationError("local channels fall outside the prior range", field="local")
        if periodic_part.numel() and periodic_part.detach().abs().max() > 1.0:
            raise ValidationError("periodic channels fall outside [-1, 1]", field="periodic")

    values = torch.cat(filled, dim=-1)
    return NoiseTensor(values, spec.with_extent(*spatial), provenance)
