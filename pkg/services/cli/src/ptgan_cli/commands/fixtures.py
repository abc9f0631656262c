"""fixtures subcommand: synthetic textures with known periodicity."""

from __future__ import annotations

import argparse

from data_ingest.synth import SynthKind, write_fixture
from ptgan_cli.commands.common import output_path, parse_size


def configure_fixtures(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kind",
        choices=[kind.value for kind in SynthKind],
        default=SynthKind.STRIPES.value,
        help="Texture family",
    )
    parser.add_argument("--size", type=parse_size, default=(256, 256), help="Pixels ROWSxCOLS")
    parser.add_argument("--period", type=float, default=16.0, help="Period in pixels")
    parser.add_argument("--angle", type=float, default=0.0, help="Orientation in degrees")


def run_fixtures(args: argparse.Namespace) -> int:
    params = {"period": args.period, "angle": args.angle, "seed": args.seed or 0}
    path = write_fixture(args.kind, args.size, output_path(args, f"{args.kind}.png"), **params)
    print(path)
    return 0
