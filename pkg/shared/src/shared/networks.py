"""Fully convolutional generator and discriminator with exact size arithmetic."""

from __future__ import annotations

import math
from typing import Optional

import torch
from torch import nn

from shared.exceptions import ValidationError
from shared.models.network import NetSpec

INIT_STD = 0.02


def upsample_factor(spec: NetSpec) -> int:
    """Pixels per noise unit along each axis: 2^depth."""
    return 2**spec.depth


def receptive_field(spec: NetSpec) -> int:
    """Extent in pixels of the output region one noise column influences."""
    extent = spec.kernel
    for _ in range(spec.depth - 1):
        extent = (extent - 1) * 2 + spec.kernel
    return extent


def noise_margin(spec: NetSpec) -> int:
    """Noise units of context needed on each side so a chunk's interior is exact."""
    half = (receptive_field(spec) - 1) / 2
    return math.ceil(half / upsample_factor(spec)) + 1


def min_chunk_extent(spec: NetSpec) -> int:
    """Smallest chunk extent in noise units: one receptive field projected into noise space."""
    return math.ceil(receptive_field(spec) / upsample_factor(spec))


def generator_channels(spec: NetSpec) -> list[int]:
    """Channel plan of the generator from noise to image."""
    return [spec.noise_channels, *reversed(spec.hidden_channels()), spec.image_channels]


def discriminator_channels(spec: NetSpec) -> list[int]:
    """Channel plan of the discriminator from image to probability map."""
    return [spec.image_channels, *spec.hidden_channels(), 1]


def _init_conv_weights(module: nn.Module, generator: Optional[torch.Generator]) -> None:
    if generator is None:
        generator = torch.Generator().manual_seed(0)
    with torch.no_grad():
        for layer in module.modules():
            if isinstance(layer, (nn.Conv2d, nn.ConvTranspose2d)):
                draw = torch.randn(layer.weight.shape, generator=generator, dtype=torch.float64)
                layer.weight.copy_(draw * INIT_STD)
                if layer.bias is not None:
                    layer.bias.zero_()
            elif isinstance(layer, nn.BatchNorm2d):
                layer.weight.fill_(1.0)
                layer.bias.zero_()


class Generator(nn.Module):
    """Stack of stride-1/2 transposed convolutions mapping (N, d, L, M) to (N, 3, 2^D L, 2^D M)."""

    def __init__(self, spec: NetSpec):
        super().__init__()
        self.spec = spec
        channels = generator_channels(spec)
        pad = spec.kernel // 2
        layers: list[nn.Module] = []
        for index, (c_in, c_out) in enumerate(zip(channels[:-1], channels[1:])):
            last = index == spec.depth - 1
            norm = spec.use_batchnorm_g and not last
            layers.append(
                nn.ConvTranspose2d(
                    c_in,
                    c_out,
                    spec.kernel,
                    stride=2,
                    padding=pad,
                    output_padding=1,
                    bias=not norm,
                )
            )
            if last:
                layers.append(nn.Tanh())
            else:
                if norm:
                    layers.append(nn.BatchNorm2d(c_out))
                layers.append(nn.ReLU())
        self.main = nn.Sequential(*layers)

    def forward(self, noise: torch.Tensor) -> torch.Tensor:
        if noise.dim() != 4 or noise.shape[1] != self.spec.noise_channels:
            raise ValidationError(
                f"generator expects (N, {self.spec.noise_channels}, L, M), "
                f"got {tuple(noise.shape)}"
            )
        return self.main(noise)


class Discriminator(nn.Module):
    """Stride-2 convolutions mapping (N, 3, H, W) to a (N, 1, H/2^D, W/2^D) probability field."""

    def __init__(self, spec: NetSpec):
        super().__init__()
        self.spec = spec
        channels = discriminator_channels(spec)
        pad = spec.kernel // 2
        layers: list[nn.Module] = []
        for index, (c_in, c_out) in enumerate(zip(channels[:-1], channels[1:])):
            last = index == spec.depth - 1
            norm = spec.use_batchnorm_d and 0 < index and not last
            layers.append(nn.Conv2d(c_in, c_out, spec.kernel, stride=2, padding=pad, bias=not norm))
            if last:
                layers.append(nn.Sigmoid())
            else:
                if norm:
                    layers.append(nn.BatchNorm2d(c_out))
                layers.append(nn.LeakyReLU(spec.leaky_slope))
        self.main = nn.Sequential(*layers)

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        factor = upsample_factor(self.spec)
        height, width = image.shape[-2:]
        if height % factor or width % factor:
            raise ValidationError(
                f"discriminator input {height}x{width} is not divisible by 2^depth = {factor}"
            )
        return self.main(image)


def build_generator(spec: NetSpec, generator: Optional[torch.Generator] = None) -> Generator:
    """Create a generator with N(0, 0.02) convolution weights."""
    net = Generator(spec)
    _init_conv_weights(net, generator)
    return net


def build_discriminator(
    spec: NetSpec, generator: Optional[torch.Generator] = None
) -> Discriminator:
    """Create a discriminator with N(0, 0.02) convolution weights."""
    net = Discriminator(spec)
    _init_conv_weights(net, generator)
    return net


def conv_weight_shapes(module: nn.Module) -> list[tuple[int, ...]]:
    """Weight shapes of every convolution in forward order."""
    return [
        tuple(layer.weight.shape)
        for layer in module.modules()
        if isinstance(layer, (nn.Conv2d, nn.ConvTranspose2d))
    ]
