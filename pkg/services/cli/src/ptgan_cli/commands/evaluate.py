"""eval subcommand: wave-number consistency report plus autocorrelation heat map."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from data_ingest.sources import decode_image, normalize_image
from evalkit.autocorr import DEFAULT_THRESHOLD, autocorrelation, detect_periodicity_peaks
from evalkit.consistency import wavenumber_consistency
from evalkit.heatmap import render_autocorr_heatmap
from ptgan_cli.commands.common import (
    add_checkpoint_argument,
    add_chunk_argument,
    parse_size,
    parse_vector,
    resolve_checkpoint,
)
from sampler.assembly import draw_global_vectors
from sampler.operations import render_tileable, resolve_models
from shared.exceptions import ArtifactIOError
from shared.settings import get_runtime_settings
from shared.utils.logger import setup_logger

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)

REPORT_NAME = "report.json"
HEATMAP_NAME = "autocorr.png"


def configure_eval(parser: argparse.ArgumentParser) -> None:
    add_checkpoint_argument(parser)
    parser.add_argument("--image", help="Evaluate this image instead of a fresh sample")
    parser.add_argument("--z-g", dest="z_g", help="Global vector as JSON list")
    parser.add_argument(
        "--size", type=parse_size, default=(16, 16), help="Noise extent of the evaluated sample"
    )
    parser.add_argument(
        "--max-lag", dest="max_lag", type=int, help="Autocorrelation window half-size"
    )
    parser.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="Peak threshold")
    parser.add_argument("--tolerance", type=float, default=0.15, help="Relative error tolerance")
    add_chunk_argument(parser)


def run_eval(args: argparse.Namespace) -> int:
    """Write report.json and autocorr.png into the --out directory."""
    bundle = resolve_models(resolve_checkpoint(args.checkpoint))
    seed = 0 if args.seed is None else args.seed
    z_g = parse_vector(args.z_g, "z_g")
    if z_g is None and bundle.noise_spec.d_g > 0:
        z_g = draw_global_vectors(bundle.noise_spec, 1, seed, "z_hat")[0]

    if args.image:
        image = normalize_image(decode_image(args.image))
    else:
        rows, cols = args.size
        chunk = settings.default_chunk if args.chunk is None else args.chunk
        # tileable so the circular autocorrelation sees no seam
        image = render_tileable(bundle, rows, cols, seed, z_g=z_g, chunk=chunk).image

    report = wavenumber_consistency(
        bundle,
        z_g,
        image,
        max_lag=args.max_lag,
        threshold=args.threshold,
        tolerance=args.tolerance,
    )
    acmap = autocorrelation(image, args.max_lag)

    out_dir = Path(args.out) if args.out else Path("eval")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / REPORT_NAME
        report_path.write_text(report.model_dump_json(indent=2) + "\n")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write report to {out_dir}: {exc}") from exc
    vectors = [match.learned_period for match in report.matches]
    heatmap_path = render_autocorr_heatmap(
        acmap,
        vectors,
        out_dir / HEATMAP_NAME,
        peaks=detect_periodicity_peaks(acmap, args.threshold),
        title=f"{report.status} (depth {report.depth})",
    )
    logger.info(
        "eval: status=%s peaks=%d min_error=%s",
        report.status,
        len(report.peaks),
        report.min_relative_error,
    )
    summary = {"status": report.status, "report": str(report_path), "heatmap": str(heatmap_path)}
    print(json.dumps(summary))
    return 0
