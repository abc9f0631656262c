"""Writing rendered images together with their plans."""

from __future__ import annotations

from pathlib import Path

from PIL import Image

from data_ingest.sources import encode_image
from sampler.operations import RenderResult
from shared.exceptions import ArtifactIOError


def plan_path_for(image_path: str | Path) -> Path:
    """``out/foo.png`` -> ``out/foo.plan.json``."""
    image_path = Path(image_path)
    return image_path.with_name(image_path.stem + ".plan.json")


def save_render(result: RenderResult, path: str | Path) -> tuple[Path, Path]:
    """Write the image as 8-bit PNG and the plan snapshot next to it."""
    path = Path(path)
    plan_path = plan_path_for(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(encode_image(result.to_hwc())).save(path, format="PNG")
        plan_path.write_text(result.plan.model_dump_json(indent=2) + "\n")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write render {path}: {exc}") from exc
    return path, plan_path
