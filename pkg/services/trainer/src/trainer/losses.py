"""Spatially averaged GAN losses."""

import torch

PROB_EPS = 1e-7


def _clamp(prob: torch.Tensor) -> torch.Tensor:
    return prob.clamp(PROB_EPS, 1.0 - PROB_EPS)


def discriminator_loss(d_fake: torch.Tensor, d_real: torch.Tensor) -> torch.Tensor:
    """Negated D objective -(mean log(1 - D(G(Z))) + mean log D(X)) over batch and positions."""
    fake_term = torch.log1p(-_clamp(d_fake)).mean()
    real_term = torch.log(_clamp(d_real)).mean()
    return -(fake_term + real_term)


def generator_loss(d_fake: torch.Tensor) -> torch.Tensor:
    """Non-saturating generator loss: -mean log D(G(Z))."""
    return -torch.log(_clamp(d_fake)).mean()
