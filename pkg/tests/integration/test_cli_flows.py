"""Integration tests driving the ptgan command line end to end."""

import json

import pytest

from ptgan_cli.main import main
from trainer.engine import read_metrics

TINY_CONFIG = {
    "run_name": "tiny",
    "noise": {"d_l": 2, "d_g": 0, "d_p": 2, "L": 4, "M": 4, "d_h": 8},
    "net": {"depth": 2, "base_channels": 4, "max_channels": 8, "noise_channels": 4},
    "train": {"patch_size": 16, "steps": 2, "minibatch": 2, "checkpoint_every": 1},
    "data": {"path": ""},
}


@pytest.fixture
def config_file(tmp_path):
    """Tiny run config on disk."""
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return path


@pytest.fixture
def stripes_png(tmp_path):
    """Stripe fixture written by the fixtures command."""
    path = tmp_path / "stripes.png"
    argv = ["fixtures", "--kind", "stripes", "--size", "64", "--period", "8", "--out", str(path)]
    assert main(argv) == 0
    return path


def test_train_sample_eval_resume(config_file, stripes_png, tmp_path, capsys):
    """Test a run trains, samples, evaluates and resumes from the command line."""
    runs = tmp_path / "runs"
    code = main(
        ["train", "--config", str(config_file), "--data", str(stripes_png), "--out", str(runs)]
    )
    assert code == 0
    run_dir = runs / "tiny"
    assert (run_dir / "config.json").is_file()
    checkpoints = sorted(p.name for p in (run_dir / "checkpoints").iterdir())
    assert checkpoints == ["step_00000000.ckpt", "step_00000001.ckpt", "step_00000002.ckpt"]

    sample = tmp_path / "out" / "sample.png"
    assert main(["sample", str(run_dir), "--size", "6x7", "--out", str(sample), "--seed", "2"]) == 0
    assert sample.is_file()
    assert (tmp_path / "out" / "sample.plan.json").is_file()

    tile = tmp_path / "out" / "tile.png"
    assert main(["tile", str(run_dir), "--size", "6", "--out", str(tile)]) == 0
    assert tile.is_file()

    capsys.readouterr()
    eval_dir = tmp_path / "eval"
    assert main(["eval", str(run_dir), "--out", str(eval_dir)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["status"] in {"consistent", "inconsistent", "aperiodic"}
    assert (eval_dir / "report.json").is_file()
    assert (eval_dir / "autocorr.png").is_file()

    assert main(["resume", str(run_dir), "--steps", "3"]) == 0
    assert [r.step for r in read_metrics(run_dir / "metrics.jsonl")] == [0, 1, 2]
    assert json.loads((run_dir / "config.json").read_text())["train"]["steps"] == 3


def test_missing_image_exit_code(config_file, tmp_path, capsys):
    """Test a missing training image exits with 4 and creates no run directory."""
    runs = tmp_path / "runs"
    code = main(
        [
            "train",
            "--config",
            str(config_file),
            "--data",
            str(tmp_path / "missing.png"),
            "--out",
            str(runs),
        ]
    )
    assert code == 4
    assert not (runs / "tiny").exists()
    assert "error:" in capsys.readouterr().err


def test_invalid_override_exit_code(config_file, stripes_png, tmp_path):
    """Test an inconsistent config exits with 2."""
    code = main(
        [
            "train",
            "--config",
            str(config_file),
            "--data",
            str(stripes_png),
            "--out",
            str(tmp_path / "runs"),
            "--override",
            "train.patch_size=20",
        ]
    )
    assert code == 2


def test_quilt_needs_global_channels(config_file, stripes_png, tmp_path):
    """Test quilting a model without global channels exits with 2."""
    runs = tmp_path / "runs"
    main(
        [
            "train",
            "--config",
            str(config_file),
            "--data",
            str(stripes_png),
            "--out",
            str(runs),
            "--steps",
            "0",
        ]
    )
    code = main(["quilt", str(runs / "tiny"), "--tiles", "2x2", "--delta", "2"])
    assert code == 2
