"""Checkpoint archive: JSON header plus named tensors in NumPy ``.npy`` layout."""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import torch
from pydantic import ValidationError as PydanticValidationError

from shared.exceptions import ArtifactIOError, NotFoundError
from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.training import TrainConfig
from shared.networks import Discriminator, Generator
from shared.noise import WaveNumberMLP

FORMAT_NAME = "ptgan-checkpoint"
FORMAT_VERSION = 1
# fixed timestamp so identical state gives identical archive bytes
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)

PREFIXES = ("generator.", "discriminator.", "mlp.", "opt_d.", "opt_g.")


@dataclass
class Checkpoint:
    """Serializable training state."""

    noise_spec: NoiseSpec
    net_spec: NetSpec
    train_config: TrainConfig
    step: int
    seed: int
    tensors: dict[str, torch.Tensor]
    optimizer_groups: dict[str, Any] = field(default_factory=dict)

    def section(self, prefix: str) -> dict[str, torch.Tensor]:
        """Return the tensors under ``prefix`` with the prefix stripped."""
        return {
            name[len(prefix) :]: tensor
            for name, tensor in self.tensors.items()
            if name.startswith(prefix)
        }


def flatten_optimizer_state(prefix: str, state_dict: dict[str, Any]) -> tuple[dict, list]:
    """Split a torch optimizer state dict into named tensors and JSON-able param groups."""
    tensors: dict[str, torch.Tensor] = {}
    for index, slots in state_dict["state"].items():
        for key, value in slots.items():
            tensor = value if isinstance(value, torch.Tensor) else torch.tensor(value)
            tensors[f"{prefix}state.{index}.{key}"] = tensor
    return tensors, state_dict["param_groups"]


def unflatten_optimizer_state(
    tensors: dict[str, torch.Tensor], param_groups: list[dict[str, Any]]
) -> dict[str, Any]:
    """Inverse of ``flatten_optimizer_state`` for a section with its prefix stripped."""
    state: dict[int, dict[str, torch.Tensor]] = {}
    for name, tensor in tensors.items():
        _, index, key = name.split(".", 2)
        state.setdefault(int(index), {})[key] = tensor
    groups = [dict(group, betas=tuple(group["betas"])) if "betas" in group else dict(group)
              for group in param_groups]
    return {"state": state, "param_groups": groups}


def _tensor_bytes(tensor: torch.Tensor) -> bytes:
    buffer = io.BytesIO()
    np.save(buffer, tensor.detach().cpu().contiguous().numpy(), allow_pickle=False)
    return buffer.getvalue()


def save_checkpoint(checkpoint: Checkpoint, path: str | Path) -> Path:
    """Write ``checkpoint`` as a ZIP archive and return its path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = sorted(checkpoint.tensors)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "step": checkpoint.step,
        "seed": checkpoint.seed,
        "noise_spec": checkpoint.noise_spec.model_dump(),
        "net_spec": checkpoint.net_spec.model_dump(),
        "train_config": checkpoint.train_config.model_dump(),
        "optimizer_groups": checkpoint.optimizer_groups,
        "rng": {
            "scheme": "derived-per-step",
            "seed": checkpoint.seed,
            "next_step": checkpoint.step,
        },
        "tensors": [
            {
                "name": name,
                "dtype": str(checkpoint.tensors[name].dtype).replace("torch.", ""),
                "shape": list(checkpoint.tensors[name].shape),
            }
            for name in names
        ],
    }
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with zipfile.ZipFile(tmp_path, "w", compression=zipfile.ZIP_STORED) as archive:
        info = zipfile.ZipInfo("header.json", date_time=_ZIP_DATE)
        archive.writestr(info, json.dumps(header, indent=2, sort_keys=True))
        for name in names:
            info = zipfile.ZipInfo(f"tensors/{name}.npy", date_time=_ZIP_DATE)
            archive.writestr(info, _tensor_bytes(checkpoint.tensors[name]))
    tmp_path.replace(path)
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Read a checkpoint archive, validating format and version."""
    path = Path(path)
    if not path.is_file():
        raise NotFoundError("Checkpoint", str(path))
    try:
        with zipfile.ZipFile(path) as archive:
            header = json.loads(archive.read("header.json"))
            if header.get("format") != FORMAT_NAME:
                raise ArtifactIOError(f"{path} is not a {FORMAT_NAME} archive")
            if header.get("version") != FORMAT_VERSION:
                raise ArtifactIOError(
                    f"{path} has checkpoint version {header.get('version')}, "
                    f"expected {FORMAT_VERSION}"
                )
            tensors = {}
            for entry in header["tensors"]:
                if not entry["name"].startswith(PREFIXES):
                    raise ArtifactIOError(f"{path} holds unknown tensor {entry['name']!r}")
                raw = archive.read(f"tensors/{entry['name']}.npy")
                array = np.load(io.BytesIO(raw), allow_pickle=False)
                tensors[entry["name"]] = torch.from_numpy(array.copy())
        return Checkpoint(
            noise_spec=NoiseSpec.model_validate(header["noise_spec"]),
            net_spec=NetSpec.model_validate(header["net_spec"]),
            train_config=TrainConfig.model_validate(header["train_config"]),
            step=int(header["step"]),
            seed=int(header["seed"]),
            tensors=tensors,
            optimizer_groups=header.get("optimizer_groups", {}),
        )
    except (zipfile.BadZipFile, KeyError, json.JSONDecodeError, PydanticValidationError) as exc:
        raise ArtifactIOError(f"{path} is not a readable checkpoint: {exc}") from exc


@dataclass
class ModelBundle:
    """Networks restored from a checkpoint, in evaluation mode."""

    generator: Generator
    discriminator: Discriminator
    mlp: Optional[WaveNumberMLP]
    noise_spec: NoiseSpec
    net_spec: NetSpec
    dtype: torch.dtype
    device: torch.device


def load_models(
    checkpoint: Checkpoint,
    *,
    dtype: torch.dtype = torch.float32,
    device: torch.device | str = "cpu",
) -> ModelBundle:
    """Rebuild G, D and the wave-number MLP from ``checkpoint`` for sampling."""
    device = torch.device(device)
    generator = Generator(checkpoint.net_spec)
    generator.load_state_dict(checkpoint.section("generator."))
    discriminator = Discriminator(checkpoint.net_spec)
    discriminator.load_state_dict(checkpoint.section("discriminator."))
    mlp: Optional[WaveNumberMLP] = None
    spec = checkpoint.noise_spec
    if spec.d_p > 0:
        mlp = WaveNumberMLP(spec.d_g, spec.d_p, spec.d_h)
        mlp.load_state_dict(checkpoint.section("mlp."))
    for module in (generator, discriminator, mlp):
        if module is not None:
            module.to(device=device, dtype=dtype).eval()
            module.requires_grad_(False)
    return ModelBundle(
        generator=generator,
        discriminator=discriminator,
        mlp=mlp,
        noise_spec=spec,
        net_spec=checkpoint.net_spec,
        dtype=dtype,
        device=device,
    )
