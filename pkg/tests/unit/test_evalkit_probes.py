"""Unit tests for locality and shift-equivariance probes."""

import pytest
import torch

from evalkit.probes import influence_window, locality_probe, shift_equivariance_probe
from sampler.assembly import plan_noise
from shared.checkpoint import load_models
from shared.exceptions import ValidationError
from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.render import RenderPlan
from shared.networks import receptive_field
from trainer.state import TrainState


def test_influence_window_width():
    """Test one noise cell reaches exactly one receptive field of pixels."""
    spec = NetSpec(depth=2, kernel=5)
    low, high = influence_window(spec, 5)
    assert (low, high) == (14, 26)
    assert high - low + 1 == receptive_field(spec)


def test_locality_box_inside_window(bundle):
    """Test a perturbation only changes pixels inside its influence window."""
    box = locality_probe(bundle, (5, 6), seed=3)
    assert not box.empty
    rows = influence_window(bundle.net_spec, 5)
    cols = influence_window(bundle.net_spec, 6)
    assert rows[0] <= box.top and box.bottom <= rows[1]
    assert cols[0] <= box.left and box.right <= cols[1]


def test_zero_magnitude_is_empty(bundle):
    """Test a zero perturbation changes nothing."""
    box = locality_probe(bundle, magnitude=0.0)
    assert box.empty
    assert box.height == 0


def test_position_outside_grid(bundle):
    """Test positions must lie on the noise grid."""
    with pytest.raises(ValidationError):
        locality_probe(bundle, (40, 0))


@pytest.mark.parametrize("depth", [4, 5])
def test_locality_deep_networks(depth, train_config):
    """Test the box stays within one receptive field for deeper generators."""
    noise = NoiseSpec(d_l=1, d_g=0, d_p=1, L=4, M=4, d_h=4)
    net = NetSpec(depth=depth, base_channels=2, max_channels=4, noise_channels=2)
    state = TrainState.create(noise, net, train_config, dtype=torch.float64)
    bundle = load_models(state.to_checkpoint(), dtype=torch.float64)
    box = locality_probe(bundle, seed=1)
    assert not box.empty
    assert box.height <= receptive_field(net)
    assert box.width <= receptive_field(net)


def test_shift_equivariance(bundle):
    """Test shifting noise by one unit shifts the interior by 2^depth pixels."""
    noise = plan_noise(bundle, RenderPlan(L_out=16, M_out=12, seed=4)).values
    assert shift_equivariance_probe(bundle.generator, noise) < 1e-10


def test_shift_probe_needs_interior(bundle):
    """Test tiny noise leaves no interior to compare."""
    noise = plan_noise(bundle, RenderPlan(L_out=4, M_out=4)).values
    with pytest.raises(ValidationError):
        shift_equivariance_probe(bundle.generator, noise)
