"""``ptgan`` command line entry point."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from ptgan_cli.commands import COMMANDS, get_command
from ptgan_cli.config import validation_error
from shared.exceptions import EXIT_OK, PTGANError
from shared.settings import get_runtime_settings
from shared.utils.logger import setup_logger

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, help="Random seed")
    parent.add_argument("--out", help="Output file or directory")
    parent.add_argument("--config", help="Run config JSON file")
    parent.add_argument("--preset", help="Named experiment preset")
    parent.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY.PATH=VALUE",
        help="Config override, repeatable; values are parsed as JSON",
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptgan", description="Train and sample periodic spatial texture GANs"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = _common_options()
    for name, command in COMMANDS.items():
        subparser = subparsers.add_parser(name, help=command.help, parents=[parent])
        command.configure(subparser)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        return get_command(args.command).run(args) or EXIT_OK
    except PydanticValidationError as exc:
        error: PTGANError = validation_error(exc)
    except PTGANError as exc:
        error = exc
    logger.error("%s failed: %s", args.command, error)
    print(f"error: {error}", file=sys.stderr)
    return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
