"""train and resume subcommands."""

from __future__ import annotations

import argparse
import shutil
from pathlib import Path

from data_ingest.sources import load_image_source
from ptgan_cli.config import build_run_config, read_config_snapshot, write_config_snapshot
from shared.checkpoint import load_checkpoint
from shared.exceptions import ConfigError, PTGANError
from shared.settings import get_runtime_settings
from shared.utils.logger import setup_logger
from trainer.engine import latest_checkpoint, train
from trainer.state import TrainState

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)


def configure_train(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", help="Training image file or folder (sets data.path)")
    parser.add_argument("--steps", type=int, help="Total optimization steps (sets train.steps)")
    parser.add_argument("--run-name", help="Run directory name under --out (sets run_name)")


def run_train(args: argparse.Namespace) -> int:
    """Validate the config, load the images, then create the run directory and train."""
    overrides = list(args.override)
    if args.steps is not None:
        overrides.append(f"train.steps={args.steps}")
    if args.run_name:
        overrides.append(f'run_name="{args.run_name}"')
    config = build_run_config(
        config_path=args.config,
        preset=args.preset,
        overrides=overrides,
        seed=args.seed,
        data_path=args.data,
        output_dir=args.out or settings.runs_dir,
    )
    source = load_image_source(config.data, config.train.patch_size)

    run_dir = Path(config.output_dir) / config.run_name
    if run_dir.exists() and any(run_dir.iterdir()):
        raise ConfigError(f"run directory {run_dir} already exists; use resume", field="run_name")
    created = not run_dir.exists()
    run_dir.mkdir(parents=True, exist_ok=True)
    try:
        write_config_snapshot(config, run_dir)
    except OSError:
        if created:
            shutil.rmtree(run_dir, ignore_errors=True)
        raise
    logger.info("Training run %s -> %s", config.run_name, run_dir)
    train(
        config.train,
        source,
        config.net,
        config.noise,
        run_dir=run_dir,
        dtype=settings.torch_dtype,
        device=settings.torch_device,
        num_workers=settings.num_workers,
        run_id=config.run_name,
    )
    print(run_dir)
    return 0


def configure_resume(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("run_dir", help="Existing run directory")
    parser.add_argument("--steps", type=int, help="New total step count")


def run_resume(args: argparse.Namespace) -> int:
    """Continue a run from its latest checkpoint."""
    run_dir = Path(args.run_dir)
    config = read_config_snapshot(run_dir)
    checkpoint = load_checkpoint(latest_checkpoint(run_dir))
    train_config = config.train
    if args.steps is not None:
        train_config = train_config.model_copy(update={"steps": args.steps})
    if train_config.steps < checkpoint.step:
        raise ConfigError(
            f"total steps {train_config.steps} below checkpoint step {checkpoint.step}",
            field="train.steps",
        )
    source = load_image_source(config.data, train_config.patch_size)
    state = TrainState.from_checkpoint(
        checkpoint,
        train_config=train_config,
        dtype=settings.torch_dtype,
        device=settings.torch_device,
    )
    if train_config != config.train:
        write_config_snapshot(config.model_copy(update={"train": train_config}), run_dir)
    logger.info("Resuming %s at step %d of %d", run_dir, state.step, train_config.steps)
    try:
        train(
            train_config,
            source,
            config.net,
            config.noise,
            run_dir=run_dir,
            start_state=state,
            dtype=settings.torch_dtype,
            device=settings.torch_device,
            num_workers=settings.num_workers,
            run_id=config.run_name,
        )
    except PTGANError:
        logger.error("Resume of %s stopped at step %d", run_dir, state.step)
        raise
    print(run_dir)
    return 0
