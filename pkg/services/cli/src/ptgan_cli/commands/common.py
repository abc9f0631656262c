"""Argument helpers shared by subcommands."""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Any, Optional

from shared.exceptions import ConfigError
from trainer.engine import latest_checkpoint


def parse_size(text: str) -> tuple[int, int]:
    """``"60x80"`` -> (60, 80); a single number gives a square."""
    parts = text.lower().split("x")
    try:
        values = [int(part) for part in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from exc
    if len(values) == 1:
        values = values * 2
    if len(values) != 2 or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS with positive sizes, got {text!r}")
    return values[0], values[1]


def parse_vector(text: Optional[str], field: str) -> Optional[Any]:
    """JSON list from a flag value, or None when the flag was not given."""
    if text is None:
        return None
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not a JSON list: {text!r}", field=field) from exc
    if not isinstance(value, list):
        raise ConfigError(f"not a JSON list: {text!r}", field=field)
    return value


def resolve_checkpoint(path: str | Path) -> Path:
    """A checkpoint file, or the latest checkpoint of a run directory."""
    path = Path(path)
    if path.is_dir():
        return latest_checkpoint(path)
    return path


def output_path(args: argparse.Namespace, default_name: str) -> Path:
    """``--out`` if given, else ``default_name`` in the working directory."""
    return Path(args.out) if args.out else Path(default_name)


def add_checkpoint_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "checkpoint", help="Checkpoint file or run directory (latest checkpoint is used)"
    )


def add_chunk_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--chunk",
        type=int,
        default=None,
        help="Max noise chunk extent per pass (0 = single pass; default from PTGAN_DEFAULT_CHUNK)",
    )
