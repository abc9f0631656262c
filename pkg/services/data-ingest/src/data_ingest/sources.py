"""Decoding and normalization of training images."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from shared.exceptions import ArtifactIOError, ImageTooSmallError, NotFoundError, ValidationError
from shared.models.run import ImageSourceDescriptor, SourceKind
from shared.settings import get_runtime_settings
from shared.utils.logger import setup_logger

settings = get_runtime_settings()
logger = setup_logger(__name__, level=settings.log_level, json_logs=settings.json_logs)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def normalize_image(pixels: np.ndarray) -> np.ndarray:
    """Map 8-bit pixels to float32 in [-1, 1]."""
    if pixels.dtype != np.uint8:
        raise ValidationError(f"expected uint8 pixels, got {pixels.dtype}")
    return pixels.astype(np.float32) / 127.5 - 1.0


def denormalize_image(image: np.ndarray) -> np.ndarray:
    """Map [-1, 1] floats back to the [0, 255] float range (no rounding)."""
    return (np.clip(image, -1.0, 1.0) + 1.0) * 127.5


def encode_image(image: np.ndarray) -> np.ndarray:
    """Round [-1, 1] floats to 8-bit pixels."""
    return np.rint(denormalize_image(image)).astype(np.uint8)


def decode_image(path: str | Path, rescale: float = 1.0) -> np.ndarray:
    """Read a PNG/JPEG as an (H, W, 3) uint8 array, optionally rescaled."""
    path = Path(path)
    if not path.is_file():
        raise NotFoundError("Image", str(path))
    try:
        with Image.open(path) as handle:
            image = handle.convert("RGB")
            if rescale != 1.0:
                size = (max(1, round(image.width * rescale)), max(1, round(image.height * rescale)))
                image = image.resize(size, Image.Resampling.BICUBIC)
            return np.asarray(image, dtype=np.uint8).copy()
    except (UnidentifiedImageError, OSError) as exc:
        raise ArtifactIOError(f"cannot decode image {path}: {exc}") from exc


@dataclass
class ImageSource:
    """Decoded training images in [-1, 1], all at least ``patch_size`` on each side."""

    descriptor: ImageSourceDescriptor
    paths: list[Path]
    images: list[np.ndarray] = field(repr=False)
    patch_size: int

    def __len__(self) -> int:
        return len(self.images)

    @property
    def min_size(self) -> tuple[int, int]:
        """Smallest height and width over all images."""
        return (
            min(image.shape[0] for image in self.images),
            min(image.shape[1] for image in self.images),
        )


def list_image_paths(descriptor: ImageSourceDescriptor) -> list[Path]:
    """Resolve the image files a descriptor points at, sorted by name."""
    root = Path(descriptor.path)
    if descriptor.kind == SourceKind.SINGLE_IMAGE:
        if not root.is_file():
            raise NotFoundError("Image", str(root))
        return [root]
    if not root.is_dir():
        raise NotFoundError("Image folder", str(root))
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise ValidationError(f"no PNG or JPEG images in {root}", field="data.path")
    return paths


def load_image_source(descriptor: ImageSourceDescriptor, patch_size: int) -> ImageSource:
    """
    Decode every image of a source and check it can hold a patch.

    Raises:
        NotFoundError: path missing
        ArtifactIOError: file is not a readable image
        ImageTooSmallError: an image is smaller than ``patch_size`` after rescaling
    """
    paths = list_image_paths(descriptor)
    images = []
    for path in paths:
        pixels = decode_image(path, descriptor.rescale)
        height, width = pixels.shape[:2]
        if height < patch_size or width < patch_size:
            raise ImageTooSmallError(str(path), (height, width), patch_size)
        images.append(normalize_image(pixels))
    logger.info(
        "Loaded %d image(s) from %s (kind=%s, rescale=%s)",
        len(images),
        descriptor.path,
        descriptor.kind.value,
        descriptor.rescale,
    )
    return ImageSource(descriptor=descriptor, paths=paths, images=images, patch_size=patch_size)


def source_from_arrays(images: list[np.ndarray], patch_size: int) -> ImageSource:
    """Wrap in-memory [-1, 1] images as a source (used by fixtures and tests)."""
    for index, image in enumerate(images):
        if image.ndim != 3 or image.shape[2] != 3:
            raise ValidationError(f"image {index} has shape {image.shape}, expected (H, W, 3)")
        if image.shape[0] < patch_size or image.shape[1] < patch_size:
            raise ImageTooSmallError(f"<array {index}>", image.shape[:2], patch_size)
    descriptor = ImageSourceDescriptor(kind=SourceKind.FOLDER, path="<memory>")
    arrays = [np.asarray(image, dtype=np.float32) for image in images]
    return ImageSource(descriptor=descriptor, paths=[], images=arrays, patch_size=patch_size)
