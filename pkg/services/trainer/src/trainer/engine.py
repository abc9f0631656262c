"""Training loop: one D update then one G update per step."""

from __future__ import annotations

import json
import math
import re
import sys
import time
from pathlib import Path
from typing import Callable, Iterable, Optional

import torch
from tqdm import tqdm

from data_ingest.patches import make_patch_loader
from data_ingest.sources import ImageSource
from shared import metrics
from shared.checkpoint import Checkpoint, save_checkpoint
from shared.exceptions import NotFoundError, TrainingDivergedError, ValidationError
from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.records import MetricRecord
from shared.models.training import TrainConfig
from shared.networks import upsample_factor
from shared.noise import NoiseTensor
from shared.settings import get_runtime_settings
from shared.utils.logger import StructuredLogger, setup_logger
from shared.utils.seeding import make_generator
from trainer.batches import make_training_batch
from trainer.losses import discriminator_loss, generator_loss
from trainer.state import TrainState

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)

CHECKPOINT_DIR = "checkpoints"
_CHECKPOINT_RE = re.compile(r"step_(\d{8})\.ckpt$")

CheckpointCallback = Callable[[Checkpoint, Optional[Path]], None]


def noise_batch(state: TrainState, stream: str, step: Optional[int] = None) -> NoiseTensor:
    """Noise minibatch for ``stream`` ("noise_d" or "noise_g") at ``step``."""
    step = state.step if step is None else step
    return make_training_batch(
        state.noise_spec,
        state.mlp,
        state.train_config.minibatch,
        make_generator(state.seed, stream, step),
        dtype=state.dtype,
        device=state.device,
    )


def discriminator_objective(
    state: TrainState, real: torch.Tensor, noise: NoiseTensor
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """D loss on a real batch and a detached fake batch; returns (loss, d_real, d_fake)."""
    with torch.no_grad():
        fake = state.generator(noise.to_generator_input().detach())
    d_real = state.discriminator(real)
    d_fake = state.discriminator(fake)
    return discriminator_loss(d_fake, d_real), d_real, d_fake


def generator_objective(state: TrainState, noise: NoiseTensor) -> torch.Tensor:
    """Non-saturating G loss; gradients reach G and the wave-number MLP."""
    fake = state.generator(noise.to_generator_input())
    return generator_loss(state.discriminator(fake))


def _check_finite(state: TrainState, losses: dict[str, float]) -> None:
    if all(math.isfinite(value) for value in losses.values()):
        return
    metrics.errors_total.labels(error_type="TRAINING_DIVERGED").inc()
    logger.error("Non-finite loss at step %d: %s", state.step, losses)
    raise TrainingDivergedError(state.step, losses)


def train_step(state: TrainState, real: torch.Tensor) -> MetricRecord:
    """
    Run one optimization step and advance ``state.step``.

    Args:
        state: Training state, modified in place
        real: Real patches ``(B, 3, P, P)`` in [-1, 1]

    Raises:
        TrainingDivergedError: a loss is NaN or infinite. A non-finite d_loss leaves
            the state untouched. A non-finite g_loss is found after the D update, so
            D and its optimizer have advanced while G, the MLP and ``state.step`` have
            not; the state is then not a valid resume point.
    """
    patch = state.train_config.patch_size
    if real.dim() != 4 or tuple(real.shape[-3:]) != (3, patch, patch):
        raise ValidationError(
            f"real batch has shape {tuple(real.shape)}, expected (B, 3, {patch}, {patch})"
        )
    real = real.to(device=state.device, dtype=state.dtype)
    step = state.step

    d_loss, d_real, d_fake = discriminator_objective(state, real, noise_batch(state, "noise_d"))
    _check_finite(state, {"d_loss": d_loss.item()})
    state.opt_d.zero_grad(set_to_none=True)
    d_loss.backward()
    state.opt_d.step()

    g_loss = generator_objective(state, noise_batch(state, "noise_g"))
    _check_finite(state, {"d_loss": d_loss.item(), "g_loss": g_loss.item()})
    state.opt_g.zero_grad(set_to_none=True)
    g_loss.backward()
    state.opt_g.step()

    state.step += 1
    record = MetricRecord(
        step=step,
        d_loss=d_loss.item(),
        g_loss=g_loss.item(),
        d_real_mean=d_real.mean().item(),
        d_fake_mean=d_fake.mean().item(),
    )
    metrics.train_steps_total.inc()
    metrics.train_loss.labels(network="discriminator").set(record.d_loss)
    metrics.train_loss.labels(network="generator").set(record.g_loss)
    metrics.discriminator_output_mean.labels(source="real").set(record.d_real_mean)
    metrics.discriminator_output_mean.labels(source="fake").set(record.d_fake_mean)
    return record


class MetricsWriter:
    """Appends ``MetricRecord`` JSON lines, dropping lines a resumed run will redo."""

    def __init__(self, path: str | Path, resume_from: int = 0):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        kept: list[str] = []
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if line.strip() and json.loads(line)["step"] < resume_from:
                    kept.append(line)
        self.path.write_text("".join(line + "\n" for line in kept))

    def write(self, record: MetricRecord) -> None:
        with self.path.open("a") as handle:
            handle.write(record.model_dump_json() + "\n")


def read_metrics(path: str | Path) -> list[MetricRecord]:
    """Parse a metrics.jsonl file."""
    path = Path(path)
    if not path.is_file():
        raise NotFoundError("Metrics log", str(path))
    return [
        MetricRecord.model_validate_json(line)
        for line in path.read_text().splitlines()
        if line.strip()
    ]


def checkpoint_path(run_dir: str | Path, step: int) -> Path:
    return Path(run_dir) / CHECKPOINT_DIR / f"step_{step:08d}.ckpt"


def latest_checkpoint(run_dir: str | Path) -> Path:
    """Checkpoint with the highest step in a run directory."""
    folder = Path(run_dir) / CHECKPOINT_DIR
    found = sorted(
        (int(match.group(1)), path)
        for path in (folder.iterdir() if folder.is_dir() else [])
        if (match := _CHECKPOINT_RE.search(path.name))
    )
    if not found:
        raise NotFoundError("Checkpoint in run directory", str(run_dir))
    return found[-1][1]


def _emit_checkpoint(
    state: TrainState,
    run_dir: Optional[Path],
    callback: Optional[CheckpointCallback],
    log: StructuredLogger,
) -> Checkpoint:
    checkpoint = state.to_checkpoint()
    path = None
    if run_dir is not None:
        path = save_checkpoint(checkpoint, checkpoint_path(run_dir, state.step))
        metrics.write_metrics(run_dir / "metrics.prom")
    metrics.checkpoints_written_total.inc()
    log.info("Checkpoint at step %d%s", state.step, f" -> {path}" if path else "", step=state.step)
    if callback is not None:
        callback(checkpoint, path)
    return checkpoint


def train(
    config: TrainConfig,
    source: ImageSource,
    net_spec: NetSpec,
    noise_spec: NoiseSpec,
    *,
    run_dir: Optional[str | Path] = None,
    start_state: Optional[TrainState] = None,
    callback: Optional[CheckpointCallback] = None,
    batches: Optional[Iterable[torch.Tensor]] = None,
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
    num_workers: int = 0,
    run_id: Optional[str] = None,
) -> TrainState:
    """
    Train until ``config.steps`` total steps, emitting checkpoints along the way.

    A fresh run emits a checkpoint at step 0. Checkpoints follow every
    ``config.checkpoint_every`` steps and at the final step. ``start_state``
    resumes a run; the metric stream it writes continues the uninterrupted one.

    Args:
        config: Optimization settings (``steps`` is the total, not the remainder)
        source: Training images
        net_spec: Architecture
        noise_spec: Noise layout with the training extent L x M
        run_dir: Directory for checkpoints and metric files; nothing is written when None
        start_state: State to resume from
        callback: Called with every emitted checkpoint and its path
        batches: Real batches to use instead of the patch loader
    """
    if len(source) == 0:
        raise ValidationError("training source has no images", field="data")
    expected_patch = upsample_factor(net_spec) * noise_spec.L
    if config.patch_size != expected_patch or noise_spec.L != noise_spec.M:
        raise ValidationError(
            f"patch size {config.patch_size} must equal 2^depth * L = {expected_patch} "
            "on a square noise extent",
            field="train.patch_size",
        )

    fresh = start_state is None
    state = start_state or TrainState.create(
        noise_spec, net_spec, config, dtype=dtype, device=device
    )
    run_path = Path(run_dir) if run_dir is not None else None
    log = StructuredLogger(logger, run_id=run_id, command="train")
    writer = MetricsWriter(run_path / "metrics.jsonl", state.step) if run_path else None

    if fresh:
        _emit_checkpoint(state, run_path, callback, log)
    remaining = max(config.steps - state.step, 0)
    if remaining == 0:
        return state

    if batches is None:
        batches = make_patch_loader(
            source,
            config.patch_size,
            config.minibatch,
            state.seed,
            start_step=state.step,
            steps=remaining,
            num_workers=num_workers,
            prefetch_factor=settings.prefetch_factor,
        )
    log.info(
        "Training steps %d..%d (minibatch %d, patch %d, lr %g)",
        state.step,
        config.steps - 1,
        config.minibatch,
        config.patch_size,
        config.learning_rate,
        step=state.step,
    )
    started = time.perf_counter()
    progress = tqdm(
        total=config.steps,
        initial=state.step,
        desc="train",
        unit="step",
        disable=not sys.stderr.isatty(),
    )
    try:
        for real in batches:
            if state.step >= config.steps:
                break
            record = train_step(state, real)
            if writer is not None:
                writer.write(record)
            progress.update(1)
            if state.step % config.log_every == 0:
                log.info(
                    "d_loss=%.4f g_loss=%.4f D(real)=%.3f D(fake)=%.3f",
                    record.d_loss,
                    record.g_loss,
                    record.d_real_mean,
                    record.d_fake_mean,
                    step=record.step,
                )
            if state.step % config.checkpoint_every == 0 or state.step == config.steps:
                _emit_checkpoint(state, run_path, callback, log)
    finally:
        progress.close()
    if state.step < config.steps:
        raise ValidationError(
            f"batch source ended at step {state.step} before {config.steps}", field="batches"
        )
    log.info("Training finished in %.1fs", time.perf_counter() - started, step=state.step)
    return state
