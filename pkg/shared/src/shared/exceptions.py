"""Toolkit exceptions with error codes and process exit codes."""

from typing import Any, Optional

# Process exit codes used by the command line entry point
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


class PTGANError(Exception):
    """Base toolkit exception with error code."""

    def __init__(
        self,
        exit_code: int,
        error_code: str,
        detail: Any = None,
    ):
        """
        Initialize toolkit exception.

        Args:
            exit_code: Process exit code reported by the CLI
            error_code: Application error code
            detail: Error detail message
        """
        super().__init__(detail)
        self.exit_code = exit_code
        self.error_code = error_code
        self.detail = detail

    def __str__(self) -> str:
        return f"{self.error_code}: {self.detail}"


# Validation errors
class ValidationError(PTGANError):
    """Invalid argument, shape mismatch or spec/plan mismatch."""

    def __init__(self, detail: str = "Validation failed", field: Optional[str] = None):
        error_detail = detail
        if field:
            error_detail = f"{field}: {detail}"
        super().__init__(
            exit_code=EXIT_CONFIG,
            error_code="VALIDATION_ERROR",
            detail=error_detail,
        )
        self.field = field


class ConfigError(PTGANError):
    """Invalid run configuration or render plan."""

    def __init__(self, detail: str = "Invalid configuration", field: Optional[str] = None):
        error_detail = detail
        if field:
            error_detail = f"{field}: {detail}"
        super().__init__(
            exit_code=EXIT_CONFIG,
            error_code="CONFIG_ERROR",
            detail=error_detail,
        )
        self.field = field


class ImageTooSmallError(PTGANError):
    """Training image smaller than the patch size."""

    def __init__(self, path: str, size: tuple[int, int], patch_size: int):
        super().__init__(
            exit_code=EXIT_CONFIG,
            error_code="IMAGE_TOO_SMALL",
            detail=(
                f"{path} is {size[0]}x{size[1]} pixels, "
                f"smaller than patch size {patch_size}x{patch_size}"
            ),
        )


class ChunkTooSmallError(PTGANError):
    """Render chunk smaller than one projected receptive field."""

    def __init__(self, chunk: int, minimum: int):
        super().__init__(
            exit_code=EXIT_CONFIG,
            error_code="CHUNK_TOO_SMALL",
            detail=f"chunk extent {chunk} is below the receptive field minimum {minimum}",
        )


class ZeroVarianceError(PTGANError):
    """Constant image passed to an autocorrelation estimator."""

    def __init__(self, detail: str = "zero variance"):
        super().__init__(
            exit_code=EXIT_CONFIG,
            error_code="ZERO_VARIANCE",
            detail=detail,
        )


# Training errors
class TrainingDivergedError(PTGANError):
    """Non-finite loss during training."""

    def __init__(self, step: int, losses: Optional[dict[str, float]] = None):
        losses = losses or {}
        shown = ", ".join(f"{name}={value}" for name, value in losses.items())
        super().__init__(
            exit_code=EXIT_DIVERGED,
            error_code="TRAINING_DIVERGED",
            detail=f"non-finite loss at step {step}" + (f" ({shown})" if shown else ""),
        )
        self.step = step
        self.losses = losses


# I/O errors
class NotFoundError(PTGANError):
    """Missing file or directory."""

    def __init__(self, resource: str = "Resource", resource_id: Optional[str] = None):
        detail = f"{resource} not found"
        if resource_id:
            detail = f"{resource} {resource_id} not found"
        super().__init__(
            exit_code=EXIT_IO,
            error_code="NOT_FOUND",
            detail=detail,
        )


class ArtifactIOError(PTGANError):
    """Unreadable or corrupt artifact (image, checkpoint, config)."""

    def __init__(self, detail: str = "Artifact could not be read"):
        super().__init__(
            exit_code=EXIT_IO,
            error_code="IO_ERROR",
            detail=detail,
        )
