"""Mutable training state and its checkpoint conversion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import torch
from torch import nn

from shared.checkpoint import Checkpoint, flatten_optimizer_state, unflatten_optimizer_state
from shared.models.network import NetSpec
from shared.models.noise import NoiseSpec
from shared.models.training import TrainConfig
from shared.networks import Discriminator, Generator, build_discriminator, build_generator
from shared.noise import WaveNumberMLP, init_wavenumber_mlp
from shared.utils.seeding import make_generator


def _adam(params: Iterator[nn.Parameter], config: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(
        list(params),
        lr=config.learning_rate,
        betas=(config.adam_beta1, config.adam_beta2),
        eps=config.adam_eps,
    )


@dataclass
class TrainState:
    """Networks, optimizers and step counter of one training run."""

    generator: Generator
    discriminator: Discriminator
    mlp: Optional[WaveNumberMLP]
    opt_d: torch.optim.Adam
    opt_g: torch.optim.Adam
    noise_spec: NoiseSpec
    net_spec: NetSpec
    train_config: TrainConfig
    step: int = 0

    @property
    def seed(self) -> int:
        return self.train_config.seed

    @property
    def dtype(self) -> torch.dtype:
        return next(self.generator.parameters()).dtype

    @property
    def device(self) -> torch.device:
        return next(self.generator.parameters()).device

    @classmethod
    def _assemble(
        cls,
        generator: Generator,
        discriminator: Discriminator,
        mlp: Optional[WaveNumberMLP],
        noise_spec: NoiseSpec,
        net_spec: NetSpec,
        train_config: TrainConfig,
        step: int,
        *,
        dtype: torch.dtype,
        device: torch.device | str,
    ) -> "TrainState":
        for module in (generator, discriminator, mlp):
            if module is not None:
                module.to(device=device, dtype=dtype).train()
        opt_d = _adam(discriminator.parameters(), train_config)
        g_params = list(generator.parameters())
        if mlp is not None:
            g_params.extend(mlp.parameters())
        opt_g = _adam(iter(g_params), train_config)
        return cls(
            generator=generator,
            discriminator=discriminator,
            mlp=mlp,
            opt_d=opt_d,
            opt_g=opt_g,
            noise_spec=noise_spec,
            net_spec=net_spec,
            train_config=train_config,
            step=step,
        )

    @classmethod
    def create(
        cls,
        noise_spec: NoiseSpec,
        net_spec: NetSpec,
        train_config: TrainConfig,
        *,
        dtype: torch.dtype = torch.float32,
        device: torch.device | str = "cpu",
    ) -> "TrainState":
        """Freshly initialized networks and optimizers for ``train_config.seed``."""
        seed = train_config.seed
        generator = build_generator(net_spec, make_generator(seed, "init", "generator"))
        discriminator = build_discriminator(net_spec, make_generator(seed, "init", "discriminator"))
        mlp = None
        if noise_spec.d_p > 0:
            mlp = init_wavenumber_mlp(noise_spec, generator=make_generator(seed, "init", "mlp"))
        return cls._assemble(
            generator,
            discriminator,
            mlp,
            noise_spec,
            net_spec,
            train_config,
            0,
            dtype=dtype,
            device=device,
        )

    def to_checkpoint(self) -> Checkpoint:
        """Snapshot every tensor (parameters, buffers, ADAM moments) on CPU."""
        tensors: dict[str, torch.Tensor] = {}
        modules = {"generator.": self.generator, "discriminator.": self.discriminator}
        if self.mlp is not None:
            modules["mlp."] = self.mlp
        for prefix, module in modules.items():
            for name, tensor in module.state_dict().items():
                tensors[prefix + name] = tensor.detach().cpu().clone()
        groups = {}
        for prefix, optimizer in (("opt_d.", self.opt_d), ("opt_g.", self.opt_g)):
            flat, param_groups = flatten_optimizer_state(prefix, optimizer.state_dict())
            tensors.update({name: t.detach().cpu().clone() for name, t in flat.items()})
            groups[prefix.rstrip(".")] = param_groups
        return Checkpoint(
            noise_spec=self.noise_spec,
            net_spec=self.net_spec,
            train_config=self.train_config,
            step=self.step,
            seed=self.seed,
            tensors=tensors,
            optimizer_groups=groups,
        )

    @classmethod
    def from_checkpoint(
        cls,
        checkpoint: Checkpoint,
        *,
        train_config: Optional[TrainConfig] = None,
        dtype: Optional[torch.dtype] = None,
        device: torch.device | str = "cpu",
    ) -> "TrainState":
        """
        Restore a state that continues exactly where ``checkpoint`` stopped.

        ``train_config`` may extend the step budget; the seed is always taken
        from the checkpoint.
        """
        config = checkpoint.train_config
        if train_config is not None:
            config = train_config.model_copy(update={"seed": checkpoint.seed})
        if dtype is None:
            dtype = checkpoint.tensors["generator.main.0.weight"].dtype
        generator = Generator(checkpoint.net_spec)
        generator.load_state_dict(checkpoint.section("generator."))
        discriminator = Discriminator(checkpoint.net_spec)
        discriminator.load_state_dict(checkpoint.section("discriminator."))
        mlp = None
        spec = checkpoint.noise_spec
        if spec.d_p > 0:
            mlp = WaveNumberMLP(spec.d_g, spec.d_p, spec.d_h)
            mlp.load_state_dict(checkpoint.section("mlp."))
        state = cls._assemble(
            generator,
            discriminator,
            mlp,
            spec,
            checkpoint.net_spec,
            config,
            checkpoint.step,
            dtype=dtype,
            device=device,
        )
        for key, optimizer in (("opt_d", state.opt_d), ("opt_g", state.opt_g)):
            saved = unflatten_optimizer_state(
                checkpoint.section(f"{key}."), checkpoint.optimizer_groups.get(key, [])
            )
            if saved["param_groups"]:
                for group in saved["param_groups"]:
                    group["lr"] = config.learning_rate
                optimizer.load_state_dict(saved)
        return state
