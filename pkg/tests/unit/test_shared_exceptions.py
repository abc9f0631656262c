"""Unit tests for toolkit exceptions."""

import pytest

from shared.exceptions import (
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_IO,
    ArtifactIOError,
    ChunkTooSmallError,
    ConfigError,
    ImageTooSmallError,
    NotFoundError,
    PTGANError,
    TrainingDivergedError,
    ValidationError,
    ZeroVarianceError,
)


@pytest.mark.parametrize(
    ("error", "code", "exit_code"),
    [
        (ValidationError("bad shape"), "VALIDATION_ERROR", EXIT_CONFIG),
        (ConfigError("bad value"), "CONFIG_ERROR", EXIT_CONFIG),
        (ImageTooSmallError("a.png", (10, 12), 160), "IMAGE_TOO_SMALL", EXIT_CONFIG),
        (ChunkTooSmallError(2, 4), "CHUNK_TOO_SMALL", EXIT_CONFIG),
        (ZeroVarianceError(), "ZERO_VARIANCE", EXIT_CONFIG),
        (TrainingDivergedError(12), "TRAINING_DIVERGED", EXIT_DIVERGED),
        (NotFoundError("Image", "a.png"), "NOT_FOUND", EXIT_IO),
        (ArtifactIOError("corrupt"), "IO_ERROR", EXIT_IO),
    ],
)
def test_codes(error, code, exit_code):
    """Test each error carries its code and process exit code."""
    assert isinstance(error, PTGANError)
    assert error.error_code == code
    assert error.exit_code == exit_code
    assert str(error).startswith(f"{code}: ")


def test_field_prefix():
    """Test field names prefix the detail."""
    error = ConfigError("must be positive", field="train.steps")
    assert error.detail == "train.steps: must be positive"
    assert error.field == "train.steps"


def test_divergence_lists_losses():
    """Test divergence detail names the step and the losses."""
    error = TrainingDivergedError(7, {"d_loss": float("nan")})
    assert error.step == 7
    assert "step 7" in error.detail
    assert "d_loss=nan" in error.detail


def test_zero_variance_message():
    """Test the default zero-variance message."""
    assert ZeroVarianceError().detail == "zero variance"


def test_not_found_detail():
    """Test not-found detail names the resource."""
    assert NotFoundError("Checkpoint", "x.ckpt").detail == "Checkpoint x.ckpt not found"
