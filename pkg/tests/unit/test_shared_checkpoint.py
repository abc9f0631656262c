"""Unit tests for the checkpoint archive."""

import json
import zipfile
from dataclasses import replace

import pytest
import torch

from shared.checkpoint import (
    FORMAT_NAME,
    flatten_optimizer_state,
    load_checkpoint,
    load_models,
    save_checkpoint,
    unflatten_optimizer_state,
)
from shared.exceptions import ArtifactIOError, NotFoundError


def test_round_trip_restores_tensors_bitwise(checkpoint, tmp_path):
    """Test every tensor and header field survives save and load."""
    path = save_checkpoint(checkpoint, tmp_path / "a.ckpt")
    loaded = load_checkpoint(path)
    assert loaded.step == checkpoint.step
    assert loaded.seed == checkpoint.seed
    assert loaded.noise_spec == checkpoint.noise_spec
    assert loaded.net_spec == checkpoint.net_spec
    assert loaded.train_config == checkpoint.train_config
    assert set(loaded.tensors) == set(checkpoint.tensors)
    for name, tensor in checkpoint.tensors.items():
        assert loaded.tensors[name].dtype == tensor.dtype
        assert torch.equal(loaded.tensors[name], tensor)


def test_identical_state_gives_identical_bytes(checkpoint, tmp_path):
    """Test archives are byte-for-byte reproducible."""
    first = save_checkpoint(checkpoint, tmp_path / "a.ckpt").read_bytes()
    second = save_checkpoint(checkpoint, tmp_path / "b.ckpt").read_bytes()
    assert first == second


def test_header_layout(checkpoint, tmp_path):
    """Test the header names format, version, rng scheme and tensor table."""
    path = save_checkpoint(checkpoint, tmp_path / "a.ckpt")
    with zipfile.ZipFile(path) as archive:
        header = json.loads(archive.read("header.json"))
        names = archive.namelist()
    assert header["format"] == FORMAT_NAME
    assert header["version"] == 1
    assert header["rng"] == {"scheme": "derived-per-step", "seed": 7, "next_step": 0}
    assert "tensors/generator.main.0.weight.npy" in names
    sections = {"generator", "discriminator", "mlp", "opt_d", "opt_g"}
    assert all(entry["name"].split(".")[0] in sections for entry in header["tensors"])


def test_missing_file(tmp_path):
    """Test a missing checkpoint raises NotFoundError."""
    with pytest.raises(NotFoundError):
        load_checkpoint(tmp_path / "missing.ckpt")


def test_corrupt_file(tmp_path):
    """Test a non-archive raises ArtifactIOError."""
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"not a zip archive")
    with pytest.raises(ArtifactIOError):
        load_checkpoint(path)


def test_version_mismatch(checkpoint, tmp_path):
    """Test an unknown version is rejected."""
    path = tmp_path / "future.ckpt"
    with zipfile.ZipFile(path, "w") as archive:
        archive.writestr("header.json", json.dumps({"format": FORMAT_NAME, "version": 99}))
    with pytest.raises(ArtifactIOError, match="version"):
        load_checkpoint(path)


def test_wrong_format(tmp_path):
    """Test an archive of another kind is rejected."""
    path = tmp_path / "other.ckpt"
    with zipfile.ZipFile(path, "w") as archive:
        archive.writestr("header.json", json.dumps({"format": "something-else", "version": 1}))
    with pytest.raises(ArtifactIOError):
        load_checkpoint(path)


def test_unknown_tensor_section(checkpoint, tmp_path):
    """Test tensors outside the known sections are rejected."""
    tensors = {**checkpoint.tensors, "extra.weight": torch.zeros(2)}
    path = save_checkpoint(replace(checkpoint, tensors=tensors), tmp_path / "extra.ckpt")
    with pytest.raises(ArtifactIOError, match="extra.weight"):
        load_checkpoint(path)


def test_optimizer_state_round_trip():
    """Test flattened ADAM state restores moments and tuple betas."""
    param = torch.nn.Parameter(torch.ones(3, dtype=torch.float64))
    optimizer = torch.optim.Adam([param], lr=0.1, betas=(0.5, 0.999))
    param.sum().backward()
    optimizer.step()
    tensors, groups = flatten_optimizer_state("opt_d.", optimizer.state_dict())
    assert "opt_d.state.0.exp_avg" in tensors
    stripped = {name[len("opt_d.") :]: tensor for name, tensor in tensors.items()}
    restored = unflatten_optimizer_state(stripped, json.loads(json.dumps(groups)))
    assert restored["param_groups"][0]["betas"] == (0.5, 0.999)
    expected = optimizer.state_dict()["state"][0]["exp_avg"]
    assert torch.equal(restored["state"][0]["exp_avg"], expected)


def test_load_models_eval_mode(checkpoint):
    """Test restored networks are frozen and in evaluation mode."""
    bundle = load_models(checkpoint, dtype=torch.float64)
    assert not bundle.generator.training
    assert not bundle.discriminator.training
    assert bundle.mlp is not None
    assert all(not p.requires_grad for p in bundle.generator.parameters())
    assert next(bundle.generator.parameters()).dtype == torch.float64
    assert torch.equal(
        bundle.generator.main[0].weight, checkpoint.tensors["generator.main.0.weight"]
    )
