"""Subcommand registry."""

from __future__ import annotations

import argparse
from typing import Callable, NamedTuple

from ptgan_cli.commands import evaluate, fixtures, render, train
from shared.exceptions import ConfigError


class Command(NamedTuple):
    help: str
    configure: Callable[[argparse.ArgumentParser], None]
    run: Callable[[argparse.Namespace], int]


COMMANDS: dict[str, Command] = {
    "train": Command(
        "Train a model on a texture image or folder", train.configure_train, train.run_train
    ),
    "resume": Command(
        "Continue a run from its latest checkpoint", train.configure_resume, train.run_resume
    ),
    "sample": Command(
        "Render one image of arbitrary size", render.configure_sample, render.run_sample
    ),
    "quilt": Command(
        "Patchwork with one global vector per tile", render.configure_quilt, render.run_quilt
    ),
    "morph": Command(
        "Interpolate textures across the image", render.configure_morph, render.run_morph
    ),
    "disentangle": Command(
        "Vary global and periodic parts separately",
        render.configure_disentangle,
        render.run_disentangle,
    ),
    "tile": Command("Render a seamlessly tileable texture", render.configure_tile, render.run_tile),
    "eval": Command("Wave-number consistency report", evaluate.configure_eval, evaluate.run_eval),
    "fixtures": Command(
        "Write a synthetic periodic texture", fixtures.configure_fixtures, fixtures.run_fixtures
    ),
}


def get_command(name: str) -> Command:
    """Return command by name."""
    try:
        return COMMANDS[name.lower()]
    except KeyError as exc:
        raise ConfigError(f"unknown command {name!r}", field="command") from exc
