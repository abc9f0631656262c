"""Unit tests for structured noise construction."""

import math

import pytest
import torch
from torch.func import functional_call

from shared.exceptions import ValidationError
from shared.models.noise import NoiseSpec
from shared.models.render import GlobalMode
from shared.noise import (
    WaveNumberMLP,
    assemble_noise,
    build_global,
    build_local,
    build_periodic_field,
    init_wavenumber_mlp,
    initial_wavenumber_means,
    mlp_wavenumbers,
    sample_phases,
    snap_wavenumbers,
    wrap_wavenumbers,
)
from shared.utils.seeding import derive_seed, make_generator


def _random_mlp(d_g, d_h, d_p, generator):
    mlp = WaveNumberMLP(d_g, d_p, d_h).double()
    with torch.no_grad():
        for param in mlp.parameters():
            param.copy_(torch.randn(param.shape, generator=generator, dtype=torch.float64))
    return mlp


@pytest.fixture
def spec():
    return NoiseSpec(d_l=3, d_g=2, d_p=2, L=6, M=7, d_h=5)


class TestNoiseSpec:
    """Tests for the NoiseSpec contract."""

    def test_total_dimension(self, spec):
        """Test d is the sum of the three cardinalities."""
        assert spec.d == 7

    def test_rejects_empty_layout(self):
        """Test a layout without channels is rejected."""
        with pytest.raises(ValueError):
            NoiseSpec(d_l=0, d_g=0, d_p=0)

    def test_rejects_inverted_prior(self):
        """Test prior_low must be below prior_high."""
        with pytest.raises(ValueError):
            NoiseSpec(prior_low=1.0, prior_high=-1.0)

    def test_with_extent(self, spec):
        """Test with_extent only changes L and M."""
        other = spec.with_extent(10, 12)
        assert (other.L, other.M) == (10, 12)
        assert other.d == spec.d


def test_derive_seed_is_stable_and_stream_specific():
    """Test derived seeds depend on every label."""
    assert derive_seed(3, "local") == derive_seed(3, "local")
    assert derive_seed(3, "local") != derive_seed(3, "global")
    assert derive_seed(3, "noise_d", 1) != derive_seed(3, "noise_d", 2)
    assert 0 <= derive_seed(3, "local") < 2**63


def test_build_local_shape_and_range(spec):
    """Test local noise fills the prior range with the requested shape."""
    local = build_local(spec, make_generator(0, "local"), (4,), dtype=torch.float64)
    assert local.shape == (4, 6, 7, 3)
    assert local.min() >= -1.0
    assert local.max() <= 1.0


def test_build_local_mean():
    """Test the sample mean of uniform local noise is within 3 sigma of zero."""
    wide = NoiseSpec(d_l=10, L=64, M=64, d_p=0)
    local = build_local(wide, make_generator(1, "local"), dtype=torch.float64)
    sigma = (2 / math.sqrt(12)) / math.sqrt(local.numel())
    assert local.abs().max() <= 1.0
    assert abs(local.mean().item()) <= 3 * sigma


def test_build_local_is_deterministic_across_dtypes(spec):
    """Test float32 draws are the float64 draws cast."""
    wide = build_local(spec, make_generator(5, "local"), dtype=torch.float64)
    narrow = build_local(spec, make_generator(5, "local"), dtype=torch.float32)
    assert torch.equal(wide.to(torch.float32), narrow)


class TestBuildGlobal:
    """Tests for every global field construction."""

    def test_broadcast_is_constant(self, spec):
        """Test broadcast mode repeats z_g at every position."""
        field = build_global(spec, "broadcast", z_g=[0.25, -0.5], dtype=torch.float64)
        assert field.values.shape == (6, 7, 2)
        expected = torch.tensor([0.25, -0.5], dtype=torch.float64)
        assert torch.equal(field.values, expected.expand(6, 7, 2))
        assert torch.equal(field.vectors, expected)

    def test_broadcast_batch_draws_one_vector_per_element(self, spec):
        """Test batched broadcast draws independent vectors."""
        field = build_global(
            spec, GlobalMode.BROADCAST, make_generator(1, "global"), batch_shape=(3,)
        )
        assert field.values.shape == (3, 6, 7, 2)
        assert field.vectors.shape == (3, 2)
        assert not torch.equal(field.vectors[0], field.vectors[1])
        assert torch.equal(field.values[1, 4, 5], field.vectors[1])

    def test_broadcast_rejects_wrong_length(self, spec):
        """Test z_g length must equal d_g."""
        with pytest.raises(ValidationError):
            build_global(spec, "broadcast", z_g=[0.1, 0.2, 0.3])

    def test_quilt_tiles_are_constant(self, spec):
        """Test quilt mode holds one vector per delta x delta tile."""
        field = build_global(spec, "quilt", make_generator(2, "global"), delta=3)
        assert field.vectors.shape == (2, 3, 2)
        values = field.values
        for row in range(6):
            for col in range(7):
                assert torch.equal(values[row, col], field.vectors[row // 3, col // 3])
        assert not torch.equal(values[0, 0], values[0, 3])

    def test_quilt_rejects_large_delta(self, spec):
        """Test delta may not exceed the smaller extent."""
        with pytest.raises(ValidationError):
            build_global(spec, "quilt", make_generator(0, "global"), delta=7)

    def test_bilinear_hits_corners(self, spec):
        """Test bilinear mode reproduces the four corner vectors."""
        corners = [[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]]
        values = build_global(spec, "bilinear", corners=corners, dtype=torch.float64).values
        assert values[0, 0].tolist() == corners[0]
        assert values[0, -1].tolist() == corners[1]
        assert values[-1, 0].tolist() == corners[2]
        assert values[-1, -1].tolist() == corners[3]

    def test_bilinear_midpoint(self):
        """Test the center of an odd grid is the corner average."""
        spec = NoiseSpec(d_l=1, d_g=1, d_p=0, L=5, M=5)
        corners = [[0.0], [1.0], [2.0], [3.0]]
        values = build_global(spec, "bilinear", corners=corners, dtype=torch.float64).values
        assert values[2, 2, 0].item() == pytest.approx(1.5, abs=1e-12)

    def test_linear_columns(self, spec):
        """Test linear mode interpolates along columns only."""
        values = build_global(
            spec, "linear", corners=[[-1.0, 1.0], [1.0, -1.0]], dtype=torch.float64
        ).values
        assert values[:, 0].tolist() == [[-1.0, 1.0]] * 6
        assert values[:, -1].tolist() == [[1.0, -1.0]] * 6
        assert torch.equal(values[0], values[5])

    def test_explicit_shape_check(self, spec):
        """Test explicit mode validates the field shape."""
        field = build_global(spec, "explicit", values=torch.zeros(6, 7, 2))
        assert field.values.shape == (6, 7, 2)
        with pytest.raises(ValidationError):
            build_global(spec, "explicit", values=torch.zeros(6, 6, 2))

    def test_rejects_empty_global_part(self):
        """Test d_g = 0 has no global field."""
        with pytest.raises(ValidationError):
            build_global(NoiseSpec(d_g=0), "broadcast", z_g=[])


class TestWaveNumberMLP:
    """Tests for the wave-number perceptron."""

    def test_initial_means(self):
        """Test initial means are evenly spaced up to pi."""
        means = initial_wavenumber_means(4)
        assert torch.allclose(means, torch.tensor([1, 2, 3, 4], dtype=torch.float64) * math.pi / 4)

    def test_output_shape(self, spec):
        """Test z_g batches map to 2 x d_p matrices."""
        mlp = init_wavenumber_mlp(spec).double()
        K = mlp(torch.zeros(3, 2, dtype=torch.float64))
        assert K.shape == (3, 2, 2)

    def test_degenerate_mlp_returns_biases(self):
        """Test d_g = 0 gives the two bias rows directly."""
        spec = NoiseSpec(d_l=2, d_g=0, d_p=3)
        mlp = init_wavenumber_mlp(spec, generator=make_generator(0, "init", "mlp")).double()
        K = mlp_wavenumbers(mlp, [])
        assert K.shape == (2, 3)
        assert torch.equal(K[0], mlp.b1)
        assert torch.equal(K[1], mlp.b2)

    def test_bias_init_near_means(self):
        """Test output biases start near the evenly spaced means."""
        spec = NoiseSpec(d_l=2, d_g=0, d_p=4)
        mlp = init_wavenumber_mlp(spec, generator=make_generator(0, "init", "mlp"))
        c = initial_wavenumber_means(4).float()
        assert torch.all((mlp.b1 - c).abs() < 0.2 * c)
        assert torch.all((mlp.b2 - c).abs() < 0.2 * c)

    def test_matches_matrix_arithmetic(self):
        """Test K = (W1 relu(W z + b) + b1, W2 relu(W z + b) + b2) written out by hand."""
        generator = make_generator(4, "mlp-arith")
        mlp = _random_mlp(2, 3, 2, generator)
        z = [0.37, -0.81]
        W, b = mlp.W.tolist(), mlp.b.tolist()
        hidden = [max(0.0, W[j][0] * z[0] + W[j][1] * z[1] + b[j]) for j in range(3)]
        rows = []
        for weights, bias in ((mlp.W1, mlp.b1), (mlp.W2, mlp.b2)):
            weights, bias = weights.tolist(), bias.tolist()
            row = [sum(weights[p][j] * hidden[j] for j in range(3)) + bias[p] for p in range(2)]
            rows.append(row)
        K = mlp_wavenumbers(mlp, z)
        expected = torch.tensor(rows, dtype=torch.float64)
        assert torch.allclose(K, expected, rtol=1e-12, atol=1e-14)

    def test_gradients_match_central_differences(self):
        """Test parameter gradients of the summed plane waves against central differences."""
        generator = make_generator(5, "mlp-grad")
        mlp = _random_mlp(2, 3, 2, generator)
        names = ("W", "b", "W1", "W2", "b1", "b2")
        params = tuple(getattr(mlp, name).detach().clone().requires_grad_(True) for name in names)
        z = torch.tensor([0.6, -0.2], dtype=torch.float64)
        phases = sample_phases(2, generator, dtype=torch.float64)

        def total(*values):
            K = functional_call(mlp, dict(zip(names, values)), (z,))
            return build_periodic_field(K, phases, 3, 4).values.sum()

        assert torch.autograd.gradcheck(total, params, eps=1e-5, atol=1e-8, rtol=1e-4)

    def test_bias_mean_over_seeds(self):
        """Test the mean initial b1 over 10^4 seeds is within 4 sigma / 100 of c."""
        spec = NoiseSpec(d_l=2, d_g=0, d_p=4)
        draws = torch.stack(
            [
                init_wavenumber_mlp(spec, generator=make_generator(seed, "init")).b1.double()
                for seed in range(10_000)
            ]
        )
        c = initial_wavenumber_means(4)
        assert torch.all((draws.mean(dim=0) - c).abs() <= 4 * 0.02 * c / 100)

    def test_rejects_wrong_input_length(self, spec):
        """Test z_g length is checked."""
        mlp = WaveNumberMLP(2, 2)
        with pytest.raises(ValidationError):
            mlp(torch.zeros(3))

    def test_requires_periodic_channels(self):
        """Test the MLP needs d_p >= 1."""
        with pytest.raises(ValidationError):
            init_wavenumber_mlp(NoiseSpec(d_l=2, d_p=0))


class TestPeriodicField:
    """Tests for plane-wave channels."""

    def test_matches_pointwise_sine(self):
        """Test the field equals sin(k1 lambda + k2 mu + phi) at every cell."""
        K = torch.tensor([[0.3, -1.1], [0.7, 2.0]], dtype=torch.float64)
        phases = torch.tensor([0.5, 4.0], dtype=torch.float64)
        field = build_periodic_field(K, phases, 4, 5)
        assert field.spatially_constant
        for lam in range(4):
            for mu in range(5):
                for i in range(2):
                    angle = K[0, i].item() * lam + K[1, i].item() * mu + phases[i].item()
                    expected = math.sin(angle)
                    assert field.values[lam, mu, i].item() == pytest.approx(expected, abs=1e-12)

    def test_offset_shifts_origin(self):
        """Test an offset evaluates a sub-window of a larger field."""
        K = torch.tensor([[0.4], [0.9]], dtype=torch.float64)
        phases = torch.tensor([1.0], dtype=torch.float64)
        full = build_periodic_field(K, phases, 8, 8).values
        window = build_periodic_field(K, phases, 3, 4, offset=(2, 3)).values
        assert torch.allclose(window, full[2:5, 3:7], atol=1e-12)

    def test_per_position_wavenumbers(self):
        """Test a K field applies a matrix per position."""
        K = torch.zeros(2, 3, 2, 1, dtype=torch.float64)
        K[1, 2, 0, 0] = 0.5
        phases = torch.zeros(1, dtype=torch.float64)
        field = build_periodic_field(K, phases, 2, 3)
        assert not field.spatially_constant
        assert field.values[1, 2, 0].item() == pytest.approx(math.sin(0.5), abs=1e-12)
        assert field.values[0, 0, 0].item() == 0.0

    def test_rejects_mismatched_shapes(self):
        """Test K with the wrong rank is rejected."""
        with pytest.raises(ValidationError):
            build_periodic_field(torch.zeros(2, 2, 2), torch.zeros(2), 3, 3)

    def test_row_sinusoid_period(self):
        """Test k = (pi/8, 0) gives a column-constant sinusoid of period 16 in lambda."""
        K = torch.tensor([[math.pi / 8], [0.0]], dtype=torch.float64)
        values = build_periodic_field(K, torch.zeros(1, dtype=torch.float64), 32, 5).values[..., 0]
        expected = torch.sin(torch.arange(32, dtype=torch.float64) * math.pi / 8)
        assert torch.allclose(values, expected[:, None].expand(32, 5), atol=1e-12)
        assert torch.allclose(values[16:], values[:16], atol=1e-12)

    @pytest.mark.parametrize("shift", [(2 * math.pi, 0.0), (0.0, 2 * math.pi)])
    def test_aliasing_identity(self, shift):
        """Test adding 2 pi to a wave number leaves the field unchanged on the lattice."""
        generator = make_generator(6, "alias")
        K = torch.rand((2, 3), generator=generator, dtype=torch.float64) * 2 - 1
        phases = sample_phases(3, generator, dtype=torch.float64)
        shifted = K + torch.tensor(shift, dtype=torch.float64)[:, None]
        base = build_periodic_field(K, phases, 8, 9).values
        aliased = build_periodic_field(shifted, phases, 8, 9).values
        assert torch.allclose(base, aliased, rtol=0.0, atol=1e-9)

    def test_phase_mean(self):
        """Test the mean of 10^5 phases is within 4 sigma of pi."""
        phases = sample_phases(100_000, make_generator(0, "phase"), dtype=torch.float64)
        sigma = 2 * math.pi / math.sqrt(12) / math.sqrt(100_000)
        assert abs(phases.mean().item() - math.pi) <= 4 * sigma

    def test_phases_in_range(self):
        """Test phases lie in [0, 2 pi)."""
        phases = sample_phases(64, make_generator(0, "phase"), (8,), dtype=torch.float32)
        assert phases.shape == (8, 64)
        assert phases.min() >= 0
        assert phases.max() < 2 * math.pi

    def test_wrap_wavenumbers(self):
        """Test wrapping lands in [-pi, pi) and preserves the aliased value."""
        K = torch.tensor([[3 * math.pi / 2, -3.5], [0.25, 7.0]], dtype=torch.float64)
        wrapped = wrap_wavenumbers(K)
        assert torch.all(wrapped >= -math.pi)
        assert torch.all(wrapped < math.pi)
        assert torch.allclose(torch.sin(wrapped * 3), torch.sin(K * 3), atol=1e-12)
        assert wrapped[1, 0].item() == pytest.approx(0.25)

    def test_snap_wavenumbers(self):
        """Test snapped wave numbers complete whole cycles over L and M."""
        K = torch.tensor([[0.33, 1.9], [-0.8, 0.05]], dtype=torch.float64)
        snapped = snap_wavenumbers(K, 10, 12)
        rows = snapped[0] * 10 / (2 * math.pi)
        cols = snapped[1] * 12 / (2 * math.pi)
        assert torch.allclose(rows, rows.round(), atol=1e-12)
        assert torch.allclose(cols, cols.round(), atol=1e-12)
        assert snapped[1, 1].item() == 0.0


class TestAssembleNoise:
    """Tests for noise assembly."""

    def test_channel_order(self, spec):
        """Test the order is local, global, periodic."""
        local = torch.full((6, 7, 3), 0.1)
        global_values = torch.full((6, 7, 2), 0.2)
        periodic = torch.full((6, 7, 2), 0.3)
        noise = assemble_noise(spec, local, global_values, periodic)
        assert noise.values.shape == (6, 7, 7)
        assert torch.equal(noise.local, local)
        assert torch.equal(noise.global_part, global_values)
        assert torch.equal(noise.periodic, periodic)
        assert noise.to_generator_input().shape == (1, 7, 6, 7)

    def test_empty_parts(self):
        """Test absent parts are allowed when their cardinality is zero."""
        spec = NoiseSpec(d_l=2, d_g=0, d_p=0, L=3, M=3)
        noise = assemble_noise(spec, torch.zeros(3, 3, 2), None, None)
        assert noise.values.shape == (3, 3, 2)
        assert noise.global_part.shape == (3, 3, 0)

    def test_missing_part(self, spec):
        """Test a missing non-empty part is rejected."""
        with pytest.raises(ValidationError):
            assemble_noise(spec, torch.zeros(6, 7, 3), None, torch.zeros(6, 7, 2))

    def test_mismatched_extent(self, spec):
        """Test parts must share the spatial extent."""
        with pytest.raises(ValidationError):
            assemble_noise(spec, torch.zeros(6, 7, 3), torch.zeros(6, 6, 2), torch.zeros(6, 7, 2))

    def test_range_checks(self, spec):
        """Test out-of-range local or periodic values are rejected."""
        with pytest.raises(ValidationError):
            local = torch.full((6, 7, 3), 2.0)
            assemble_noise(spec, local, torch.zeros(6, 7, 2), torch.zeros(6, 7, 2))
        with pytest.raises(ValidationError):
            periodic = torch.full((6, 7, 2), 1.5)
            assemble_noise(spec, torch.zeros(6, 7, 3), torch.zeros(6, 7, 2), periodic)

    def test_spec_follows_extent(self, spec):
        """Test the assembled spec carries the actual extent."""
        noise = assemble_noise(
            spec, torch.zeros(2, 3, 3), torch.zeros(2, 3, 2), torch.zeros(2, 3, 2)
        )
        assert (noise.spec.L, noise.spec.M) == (2, 3)
