"""Pytest configuration and shared fixtures."""

import os
import sys
from pathlib import Path

import pytest

# Add component paths to sys.path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "services" / "data-ingest" / "src"))
sys.path.insert(0, str(project_root / "services" / "trainer" / "src"))
sys.path.insert(0, str(project_root / "services" / "sampler" / "src"))
sys.path.insert(0, str(project_root / "services" / "evalkit" / "src"))
sys.path.insert(0, str(project_root / "services" / "cli" / "src"))
sys.path.insert(0, str(project_root / "shared" / "src"))

# Set test environment variables
os.environ["PTGAN_ENV"] = "test"
os.environ["PTGAN_DEVICE"] = "cpu"
os.environ.setdefault("PTGAN_LOG_LEVEL", "DEBUG")

import torch  # noqa: E402

from data_ingest.sources import source_from_arrays  # noqa: E402
from data_ingest.synth import synth_texture  # noqa: E402
from shared.checkpoint import load_models  # noqa: E402
from shared.models.network import NetSpec  # noqa: E402
from shared.models.noise import NoiseSpec  # noqa: E402
from shared.models.training import TrainConfig  # noqa: E402
from trainer.state import TrainState  # noqa: E402


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless PTGAN_RUN_SLOW=1."""
    if os.getenv("PTGAN_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set PTGAN_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def noise_spec():
    """Small noise layout with every part present."""
    return NoiseSpec(d_l=2, d_g=2, d_p=2, L=4, M=4, d_h=8)


@pytest.fixture
def net_spec():
    """Depth-2 network matching ``noise_spec``."""
    return NetSpec(depth=2, base_channels=4, max_channels=8, noise_channels=6)


@pytest.fixture
def train_config():
    """Four-step run on 16 x 16 patches."""
    return TrainConfig(minibatch=2, patch_size=16, steps=4, checkpoint_every=2, log_every=1, seed=7)


@pytest.fixture
def train_state(noise_spec, net_spec, train_config):
    """Freshly initialized float64 training state."""
    return TrainState.create(noise_spec, net_spec, train_config, dtype=torch.float64)


@pytest.fixture
def checkpoint(train_state):
    """Checkpoint of the fresh training state."""
    return train_state.to_checkpoint()


@pytest.fixture
def bundle(checkpoint):
    """Float64 evaluation-mode models."""
    return load_models(checkpoint, dtype=torch.float64)


@pytest.fixture
def stripes_source():
    """In-memory source holding one 48 x 48 stripe texture."""
    image = synth_texture("stripes", 48, period=8).astype("float32")
    return source_from_arrays([image], 16)
