"""Unit tests for presets, overrides and run-config validation."""

import argparse
import json

import pytest

from ptgan_cli.commands import COMMANDS, get_command
from ptgan_cli.commands.common import parse_size, parse_vector
from ptgan_cli.config import (
    apply_overrides,
    build_run_config,
    parse_override,
    read_config_snapshot,
    write_config_snapshot,
)
from ptgan_cli.presets import PRESETS, get_preset, preset_document
from shared.exceptions import ConfigError, NotFoundError


@pytest.mark.parametrize(
    "name,expected",
    [
        ("text-p6", (0, 10, 2, 4)),
        ("single-honeycomb", (0, 10, 2, 5)),
        ("merrigum", (10, 30, 2, 5)),
        ("dtd", (40, 20, 4, 5)),
        ("facades", (40, 20, 6, 5)),
        ("sydney", (30, 20, 4, 5)),
    ],
)
def test_presets(name, expected):
    """Test (d_g, d_l, d_p, depth) of every preset."""
    assert tuple(get_preset(name)) == expected


def test_preset_names_are_case_insensitive():
    """Test preset lookup ignores case."""
    assert get_preset("DTD") == PRESETS["dtd"]


def test_unknown_preset():
    """Test unknown presets raise ConfigError."""
    with pytest.raises(ConfigError) as excinfo:
        get_preset("nope")
    assert excinfo.value.exit_code == 2


def test_preset_document_extent():
    """Test depth-4 presets train on 10 x 10 noise for 160 pixel patches."""
    document = preset_document("text-p6")
    assert document["noise"]["L"] == 10
    assert document["train"]["patch_size"] == 160


def test_parse_override():
    """Test values are parsed as JSON with a string fallback."""
    assert parse_override("train.steps=100") == (["train", "steps"], 100)
    assert parse_override("data.path=img.png") == (["data", "path"], "img.png")
    assert parse_override('run_name="a=b"') == (["run_name"], "a=b")


@pytest.mark.parametrize("text", ["novalue", "=3"])
def test_parse_override_rejects(text):
    """Test malformed overrides raise ConfigError."""
    with pytest.raises(ConfigError):
        parse_override(text)


def test_apply_overrides_copies():
    """Test overrides create sections and leave the input untouched."""
    document = {"train": {"steps": 1}}
    result = apply_overrides(document, ["train.steps=5", "noise.d_l=3"])
    assert result == {"train": {"steps": 5}, "noise": {"d_l": 3}}
    assert document == {"train": {"steps": 1}}


def test_apply_overrides_into_scalar():
    """Test an override cannot descend into a scalar."""
    with pytest.raises(ConfigError):
        apply_overrides({"train": 3}, ["train.steps=5"])


def test_preset_run_config():
    """Test the dtd preset validates with 160 pixel patches and 64 noise channels."""
    config = build_run_config(preset="dtd", data_path="texture.png", seed=3)
    assert config.train.patch_size == 160
    assert config.net.noise_channels == 64
    assert config.train.seed == 3
    assert config.data.path == "texture.png"


def test_derived_fields_follow_overrides():
    """Test patch size and noise channels are recomputed after overrides."""
    config = build_run_config(
        preset="dtd",
        data_path="texture.png",
        overrides=["noise.L=4", "noise.M=4", "noise.d_p=2"],
    )
    assert config.train.patch_size == 128
    assert config.net.noise_channels == 62


def test_explicit_derived_field_is_checked():
    """Test an explicit inconsistent patch size is rejected."""
    with pytest.raises(ConfigError) as excinfo:
        build_run_config(preset="dtd", data_path="texture.png", overrides=["train.patch_size=100"])
    assert "patch_size" in excinfo.value.detail


def test_needs_one_source():
    """Test exactly one of a config file and a preset is required."""
    with pytest.raises(ConfigError):
        build_run_config(data_path="texture.png")
    with pytest.raises(ConfigError):
        build_run_config(config_path="a.json", preset="dtd", data_path="texture.png")


def test_needs_data():
    """Test a run without training data is rejected."""
    with pytest.raises(ConfigError) as excinfo:
        build_run_config(preset="dtd")
    assert excinfo.value.field == "data.path"


def test_missing_config_file(tmp_path):
    """Test a missing config file raises NotFoundError."""
    with pytest.raises(NotFoundError):
        build_run_config(config_path=tmp_path / "missing.json")


def test_config_file_and_snapshot(tmp_path):
    """Test a config file validates and its snapshot reloads unchanged."""
    document = {
        "run_name": "tiny",
        "noise": {"d_l": 2, "d_g": 0, "d_p": 2, "L": 4, "M": 4},
        "net": {"depth": 2, "base_channels": 4, "noise_channels": 4},
        "train": {"patch_size": 16, "steps": 2, "minibatch": 2},
        "data": {"path": "stripes.png"},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document))
    config = build_run_config(config_path=path, output_dir=str(tmp_path / "runs"))
    assert config.output_dir == str(tmp_path / "runs")

    run_dir = tmp_path / "runs" / "tiny"
    run_dir.mkdir(parents=True)
    snapshot = write_config_snapshot(config, run_dir)
    assert json.loads(snapshot.read_text())["run_name"] == "tiny"
    assert read_config_snapshot(run_dir) == config


def test_unknown_field_is_rejected(tmp_path):
    """Test unknown keys carry their path in the error."""
    with pytest.raises(ConfigError) as excinfo:
        build_run_config(preset="dtd", data_path="x.png", overrides=["train.speed=3"])
    assert excinfo.value.field == "train.speed"


@pytest.mark.parametrize("text,expected", [("60x80", (60, 80)), ("7", (7, 7)), ("4X5", (4, 5))])
def test_parse_size(text, expected):
    """Test ROWSxCOLS parsing."""
    assert parse_size(text) == expected


@pytest.mark.parametrize("text", ["0x4", "axb", "1x2x3"])
def test_parse_size_rejects(text):
    """Test invalid sizes are argparse errors."""
    with pytest.raises(argparse.ArgumentTypeError):
        parse_size(text)


def test_parse_vector():
    """Test vectors are JSON lists."""
    assert parse_vector(None, "z_g") is None
    assert parse_vector("[0.5, -1]", "z_g") == [0.5, -1]
    with pytest.raises(ConfigError):
        parse_vector("0.5", "z_g")


def test_command_registry():
    """Test every subcommand is registered and unknown names are rejected."""
    assert set(COMMANDS) == {
        "train",
        "resume",
        "sample",
        "quilt",
        "morph",
        "disentangle",
        "tile",
        "eval",
        "fixtures",
    }
    assert get_command("eval") is COMMANDS["eval"]
    with pytest.raises(ConfigError):
        get_command("serve")
