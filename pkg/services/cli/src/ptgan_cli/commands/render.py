"""sample, quilt, morph, disentangle and tile subcommands."""

from __future__ import annotations

import argparse
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from ptgan_cli.commands.common import (
    add_checkpoint_argument,
    add_chunk_argument,
    output_path,
    parse_size,
    parse_vector,
    resolve_checkpoint,
)
from ptgan_cli.config import read_document, validation_error
from sampler.operations import (
    DisentangleMode,
    RenderResult,
    render,
    render_disentangled,
    render_linear_morph,
    render_morph,
    render_quilt,
    render_tileable,
    resolve_models,
)
from sampler.output import save_render
from shared.models.render import RenderPlan
from shared.settings import get_runtime_settings

settings = get_runtime_settings()


def _seed(args: argparse.Namespace) -> int:
    return 0 if args.seed is None else args.seed


def _chunk(args: argparse.Namespace) -> int:
    return settings.default_chunk if args.chunk is None else args.chunk


def _save(result: RenderResult, path: Path) -> int:
    image_path, plan_path = save_render(result, path)
    print(image_path)
    print(plan_path)
    return 0


# --- sample ---
def configure_sample(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument("--size", type=parse_size, default=(5, 5), help="Noise extent ROWSxCOLS")
    parser.add_argument("--z-g", dest="z_g", help="Global vector as JSON list")
    parser.add_argument("--plan", help="Render plan JSON file (flags --seed/--chunk still apply)")
    add_chunk_argument(parser)


def run_sample(args: argparse.Namespace) -> int:
    """Render one image of arbitrary size."""
    bundle = resolve_models(resolve_checkpoint(args.checkpoint))
    if args.plan:
        document = read_document(args.plan)
        if args.seed is not None:
            document["seed"] = args.seed
        if args.chunk is not None:
            document["chunk"] = args.chunk
    else:
        rows, cols = args.size
        document = {
            "L_out": rows,
            "M_out": cols,
            "z_g": parse_vector(args.z_g, "z_g"),
            "seed": _seed(args),
            "chunk": _chunk(args),
        }
    try:
        plan = RenderPlan.model_validate(document)
    except PydanticValidationError as exc:
        raise validation_error(exc, prefix="plan") from exc
    return _save(render(bundle, plan, operation="sample"), output_path(args, "sample.png"))


# --- quilt ---
def configure_quilt(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument("--tiles", type=parse_size, default=(4, 4), help="Tile grid ROWSxCOLS")
    parser.add_argument("--delta", type=int, default=15, help="Tile edge in noise units")
    add_chunk_argument(parser)


def run_quilt(args: argparse.Namespace) -> int:
    """Patchwork of textures with one z^g per tile."""
    tiles_y, tiles_x = args.tiles
    result = render_quilt(
        resolve_checkpoint(args.checkpoint),
        tiles_y,
        tiles_x,
        args.delta,
        _seed(args),
        chunk=_chunk(args),
    )
    return _save(result, output_path(args, "quilt.png"))


# --- morph ---
def configure_morph(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument("--size", type=parse_size, default=(50, 50), help="Noise extent ROWSxCOLS")
    parser.add_argument(
        "--corners",
        help="JSON list of 4 z^g (top-left, top-right, bottom-left, bottom-right), "
        "or 2 (left, right) with --linear",
    )
    parser.add_argument("--linear", action="store_true", help="Horizontal morph between 2 vectors")
    parser.add_argument(
        "--fix-periodic",
        action="store_true",
        help="With --linear: one wave-number matrix for the whole image",
    )
    parser.add_argument("--periodic-z-g", dest="periodic_z_g", help="z^g for --fix-periodic")
    add_chunk_argument(parser)


def run_morph(args: argparse.Namespace) -> int:
    """Bilinear (or linear) interpolation of the texture manifold across the image."""
    rows, cols = args.size
    corners = parse_vector(args.corners, "corners")
    source = resolve_checkpoint(args.checkpoint)
    if args.linear:
        left, right = (corners or [None, None])[:2] if corners else (None, None)
        result = render_linear_morph(
            source,
            left,
            right,
            rows,
            cols,
            fix_periodic=args.fix_periodic,
            periodic_z_g=parse_vector(args.periodic_z_g, "periodic_z_g"),
            seed=_seed(args),
            chunk=_chunk(args),
        )
    else:
        result = render_morph(source, corners, rows, cols, _seed(args), chunk=_chunk(args))
    return _save(result, output_path(args, "morph.png"))


# --- disentangle ---
def configure_disentangle(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in DisentangleMode] + ["all"],
        default="all",
        help="Which part varies per tile; 'all' writes one image per mode",
    )
    parser.add_argument("--tiles", type=parse_size, default=(3, 3), help="Tile grid ROWSxCOLS")
    parser.add_argument("--delta", type=int, default=10, help="Tile edge in noise units")
    parser.add_argument("--z-hat", dest="z_hat", help="Fixed z^g as JSON list")
    add_chunk_argument(parser)


def run_disentangle(args: argparse.Namespace) -> int:
    """Quilts varying only the global part, only the periodic part, or both."""
    tiles_y, tiles_x = args.tiles
    modes = list(DisentangleMode) if args.mode == "all" else [DisentangleMode(args.mode)]
    bundle = resolve_models(resolve_checkpoint(args.checkpoint))
    z_hat = parse_vector(args.z_hat, "z_hat")
    target = output_path(args, "disentangle.png")
    for mode in modes:
        result = render_disentangled(
            bundle, mode, tiles_y, tiles_x, args.delta, z_hat, _seed(args), chunk=_chunk(args)
        )
        path = target if len(modes) == 1 else target.with_name(f"{target.stem}_{mode.value}.png")
        _save(result, path)
    return 0


# --- tile ---
def configure_tile(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument("--size", type=parse_size, default=(8, 8), help="Noise extent ROWSxCOLS")
    parser.add_argument("--z-g", dest="z_g", help="Global vector as JSON list")
    add_chunk_argument(parser)


def run_tile(args: argparse.Namespace) -> int:
    """Tileable texture: opposite edges continue each other."""
    rows, cols = args.size
    result = render_tileable(
        resolve_checkpoint(args.checkpoint),
        rows,
        cols,
        _seed(args),
        z_g=parse_vector(args.z_g, "z_g"),
        chunk=_chunk(args),
    )
    return _save(result, output_path(args, "tile.png"))
