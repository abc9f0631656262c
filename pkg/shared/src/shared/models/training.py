"""Optimisation settings."""

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """Adversarial training hyperparameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(default=2e-4, ge=0.0, description="ADAM learning rate")
    adam_beta1: float = Field(default=0.5, ge=0.0, lt=1.0, description="ADAM beta1")
    adam_beta2: float = Field(default=0.999, ge=0.0, lt=1.0, description="ADAM beta2")
    adam_eps: float = Field(default=1e-8, gt=0.0, description="ADAM epsilon")
    minibatch: int = Field(default=25, ge=1, description="Minibatch size")
    patch_size: int = Field(default=160, ge=1, description="Square patch edge in pixels")
    steps: int = Field(default=2000, ge=0, description="Total optimisation steps")
    seed: int = Field(default=0, ge=0, description="Master seed")
    log_every: int = Field(default=50, ge=1, description="Steps between INFO log lines")
    checkpoint_every: int = Field(default=500, ge=1, description="Steps between checkpoints")
