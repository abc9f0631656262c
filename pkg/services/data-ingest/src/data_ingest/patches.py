"""Random patch minibatches and an ordered prefetching loader."""

from __future__ import annotations

from typing import Optional

import numpy as np
import torch
from torch.utils.data import DataLoader, Dataset

from data_ingest.sources import ImageSource
from shared.exceptions import ValidationError
from shared.utils.seeding import derive_seed


def sample_patch_batch(
    source: ImageSource, patch_size: int, batch: int, seed: int
) -> np.ndarray:
    """
    Crop ``batch`` square patches at uniformly random positions.

    Each patch comes from a uniformly chosen image of the source and a
    uniformly chosen top-left corner among the valid ones.

    Returns:
        float32 array of shape ``(batch, patch_size, patch_size, 3)`` in [-1, 1]
    """
    if batch < 1:
        raise ValidationError("batch must be at least 1", field="batch")
    if patch_size > min(source.min_size):
        raise ValidationError(
            f"patch size {patch_size} exceeds the smallest image {source.min_size}",
            field="patch_size",
        )
    rng = np.random.default_rng(seed)
    out = np.empty((batch, patch_size, patch_size, 3), dtype=np.float32)
    for index in range(batch):
        image = source.images[int(rng.integers(len(source.images)))]
        height, width = image.shape[:2]
        top = int(rng.integers(height - patch_size + 1))
        left = int(rng.integers(width - patch_size + 1))
        out[index] = image[top : top + patch_size, left : left + patch_size]
    return out


class PatchBatchDataset(Dataset):
    """Map-style dataset whose item ``k`` is the real minibatch for training step ``k``."""

    def __init__(
        self,
        source: ImageSource,
        patch_size: int,
        batch: int,
        seed: int,
        start_step: int = 0,
        steps: int = 0,
    ):
        self.source = source
        self.patch_size = patch_size
        self.batch = batch
        self.seed = seed
        self.start_step = start_step
        self.steps = steps

    def __len__(self) -> int:
        return self.steps

    def __getitem__(self, index: int) -> torch.Tensor:
        step = self.start_step + index
        patches = sample_patch_batch(
            self.source,
            self.patch_size,
            self.batch,
            derive_seed(self.seed, "patches", step),
        )
        # (B, P, P, 3) -> (B, 3, P, P)
        return torch.from_numpy(patches).permute(0, 3, 1, 2).contiguous()


def make_patch_loader(
    source: ImageSource,
    patch_size: int,
    batch: int,
    seed: int,
    *,
    start_step: int = 0,
    steps: int,
    num_workers: int = 0,
    prefetch_factor: Optional[int] = 2,
) -> DataLoader:
    """Loader yielding one ``(B, 3, P, P)`` batch per step, in step order."""
    dataset = PatchBatchDataset(source, patch_size, batch, seed, start_step, steps)
    kwargs = {}
    if num_workers > 0:
        kwargs["prefetch_factor"] = prefetch_factor
        kwargs["persistent_workers"] = False
    return DataLoader(
        dataset,
        batch_size=None,
        shuffle=False,
        num_workers=num_workers,
        **kwargs,
    )
